#pragma once

#include <array>
#include <string_view>

namespace unimotion {

enum class Modality : int { Text = 0, Speech, Music, Video };

inline constexpr int kNumModalities = 4;
inline constexpr std::array<Modality, kNumModalities> kAllModalities = {
    Modality::Text, Modality::Speech, Modality::Music, Modality::Video};

std::string_view modality_name(Modality m);
/// Throws ValidationError for an unknown name.
Modality modality_from_name(std::string_view name);

}  // namespace unimotion

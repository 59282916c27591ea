#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace roofpedia {

enum class Typology { Green, Solar };

inline constexpr std::array<Typology, 2> kTypologies = {Typology::Green, Typology::Solar};

inline std::string_view to_string(Typology t) { return t == Typology::Green ? "green" : "solar"; }

inline std::optional<Typology> parse_typology(std::string_view s) {
    if (s == "green" || s == "Green")
        return Typology::Green;
    if (s == "solar" || s == "Solar")
        return Typology::Solar;
    return std::nullopt;
}

} // namespace roofpedia

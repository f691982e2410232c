#pragma once

#include <string>
#include <vector>

#include "spectral_plane/search.hpp"

namespace spectral_plane {

// Locale-independent number text: shortest-of-17-significant-digits via
// std::to_chars, so identical runs produce identical bytes.
std::string format_double(double value);

// Candidate lists round-trip through {"candidates":[...]} documents.
std::string candidates_to_json(const std::vector<Candidate>& candidates);
std::vector<Candidate> candidates_from_json(const std::string& text);

// {"g", "theta", "t", "t_max", "gap_margin"}; unknown fields are rejected.
RawConfig raw_config_from_json(const std::string& text);

} // namespace spectral_plane

#pragma once

#include <string>
#include <string_view>

namespace cer::text {

/// Classic Porter (1980) suffix-stripping stemmer, following Martin Porter's
/// reference C implementation (including its two published departures:
/// "bli" -> "ble" and "logi" -> "log" in step 2).
///
/// Only words made entirely of ASCII lowercase letters are stemmed; any other
/// token (digits, mixed alphanumerics, non-ASCII) is returned unchanged.
/// Words of length <= 2 are never altered.
std::string porter_stem(std::string_view word);

}  // namespace cer::text

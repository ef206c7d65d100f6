// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace stegano {

// Classic Metaphone phonetic code (Philips 1990). Input may be mixed case;
// non-alphabetic characters are ignored. Returns the empty string when the
// input has no alphabetic content.
std::string metaphone(std::string_view word);

}  // namespace stegano

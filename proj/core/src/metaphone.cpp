// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/metaphone.hpp"

#include <cctype>

namespace stegano {
namespace {

bool is_vowel(char c) {
  return c == 'A' || c == 'E' || c == 'I' || c == 'O' || c == 'U';
}

}  // namespace

std::string metaphone(std::string_view word) {
  // Normalize: uppercase letters only.
  std::string w;
  w.reserve(word.size());
  for (char c : word) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      w.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  if (w.empty()) return {};

  const auto at = [&](std::size_t i) -> char {
    return i < w.size() ? w[i] : '\0';
  };

  std::size_t i = 0;
  // Initial-letter exceptions.
  if (w.size() >= 2) {
    const char a = w[0], b = w[1];
    if ((a == 'A' && b == 'E') || (a == 'G' && b == 'N') ||
        (a == 'K' && b == 'N') || (a == 'P' && b == 'N') ||
        (a == 'W' && b == 'R')) {
      i = 1;  // drop the first letter
    } else if (a == 'X') {
      w[0] = 'S';
    } else if (a == 'W' && b == 'H') {
      w.erase(1, 1);  // WH- behaves as W-
    }
  } else if (w[0] == 'X') {
    w[0] = 'S';
  }

  std::string code;
  const std::size_t start = i;
  for (; i < w.size(); ++i) {
    const char c = w[i];
    const char prev = i > 0 ? w[i - 1] : '\0';
    const char next = at(i + 1);

    // Collapse doubled letters except C (as in "accept").
    if (c == prev && c != 'C') continue;

    if (is_vowel(c)) {
      if (i == start) code.push_back(c);
      continue;
    }

    switch (c) {
      case 'B':
        // Silent terminal B after M ("lamb").
        if (!(i + 1 == w.size() && prev == 'M')) code.push_back('B');
        break;
      case 'C':
        if (next == 'I' && at(i + 2) == 'A') {
          code.push_back('X');  // -CIA-
        } else if (next == 'H') {
          code.push_back(prev == 'S' ? 'K' : 'X');  // SCH- hard, else -CH-
        } else if (next == 'I' || next == 'E' || next == 'Y') {
          if (prev != 'S') code.push_back('S');  // soft C; -SCI- keeps the S
        } else {
          code.push_back('K');
        }
        break;
      case 'D':
        if (next == 'G' &&
            (at(i + 2) == 'E' || at(i + 2) == 'Y' || at(i + 2) == 'I')) {
          code.push_back('J');  // -DGE-/-DGY-/-DGI-
        } else {
          code.push_back('T');
        }
        break;
      case 'F':
        code.push_back('F');
        break;
      case 'G':
        if (next == 'H') {
          // GH is silent unless followed by a vowel ("ghost").
          if (i + 2 < w.size() && is_vowel(at(i + 2))) code.push_back('K');
        } else if (next == 'N') {
          // -GN / -GNED are silent.
          if (!(i + 2 == w.size() ||
                (at(i + 2) == 'E' && at(i + 3) == 'D' && i + 4 == w.size()))) {
            code.push_back('K');
          }
        } else if (next == 'I' || next == 'E' || next == 'Y') {
          if (prev != 'G') code.push_back('J');  // soft G; -GG- already hard
        } else {
          code.push_back('K');
        }
        break;
      case 'H':
        // Silent after a vowel with no vowel following, and inside digraphs
        // consumed by the preceding consonant.
        if (prev == 'C' || prev == 'S' || prev == 'P' || prev == 'T' ||
            prev == 'G') {
          break;
        }
        if (is_vowel(prev) && !is_vowel(next)) break;
        code.push_back('H');
        break;
      case 'J':
        code.push_back('J');
        break;
      case 'K':
        if (prev != 'C') code.push_back('K');  // -CK- keeps only the C's K
        break;
      case 'L':
        code.push_back('L');
        break;
      case 'M':
        code.push_back('M');
        break;
      case 'N':
        code.push_back('N');
        break;
      case 'P':
        code.push_back(next == 'H' ? 'F' : 'P');
        break;
      case 'Q':
        code.push_back('K');
        break;
      case 'R':
        code.push_back('R');
        break;
      case 'S':
        if (next == 'H' ||
            (next == 'I' && (at(i + 2) == 'O' || at(i + 2) == 'A'))) {
          code.push_back('X');  // -SH-, -SIO-, -SIA-
        } else {
          code.push_back('S');
        }
        break;
      case 'T':
        if (next == 'I' && (at(i + 2) == 'O' || at(i + 2) == 'A')) {
          code.push_back('X');  // -TIO-/-TIA-
        } else if (next == 'H') {
          code.push_back('0');  // theta
        } else if (next == 'C' && at(i + 2) == 'H') {
          // -TCH- : the CH carries the sound.
        } else {
          code.push_back('T');
        }
        break;
      case 'V':
        code.push_back('F');
        break;
      case 'W':
        if (is_vowel(next)) code.push_back('W');
        break;
      case 'X':
        code += "KS";
        break;
      case 'Y':
        if (is_vowel(next)) code.push_back('Y');
        break;
      case 'Z':
        code.push_back('S');
        break;
      default:
        break;
    }
  }
  return code;
}

}  // namespace stegano

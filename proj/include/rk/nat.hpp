#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rk {

// Unbounded natural number. All codes, indices and numerals in this library
// are Nat; negative values never appear and are rejected where they could.
using Nat = boost::multiprecision::cpp_int;

inline Nat nat(std::uint64_t v) { return Nat(v); }

struct CodecError : std::runtime_error {
  explicit CodecError(const std::string& what) : std::runtime_error(what) {}
};

// Cantor diagonal pairing <a,b> = (a+b)(a+b+1)/2 + b.
inline Nat pair_nat(const Nat& a, const Nat& b) {
  Nat s = a + b;
  return s * (s + 1) / 2 + b;
}

inline std::pair<Nat, Nat> unpair_nat(const Nat& n) {
  // w = floor((sqrt(8n+1)-1)/2), the diagonal index.
  Nat disc = 8 * n + 1;
  Nat w = (boost::multiprecision::sqrt(disc) - 1) / 2;
  Nat t = w * (w + 1) / 2;
  Nat b = n - t;
  Nat a = w - b;
  return {a, b};
}

// Lists of naturals: nil = 0, cons(h, t) = <h, t> + 1.
inline Nat list_nil() { return Nat(0); }

inline Nat list_cons(const Nat& head, const Nat& tail) {
  return pair_nat(head, tail) + 1;
}

inline bool list_is_nil(const Nat& n) { return n == 0; }

inline std::pair<Nat, Nat> list_uncons(const Nat& n) {
  if (n == 0) throw CodecError("list_uncons: nil");
  return unpair_nat(n - 1);
}

inline Nat list_encode(const std::vector<Nat>& xs) {
  Nat acc = list_nil();
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) acc = list_cons(*it, acc);
  return acc;
}

inline std::vector<Nat> list_decode(Nat n) {
  std::vector<Nat> out;
  while (!list_is_nil(n)) {
    auto [h, t] = list_uncons(n);
    out.push_back(h);
    n = t;
  }
  return out;
}

// Identifier strings over [a-z0-9_$#] coded as base-40 digit lists
// (digit 0 is reserved so leading characters survive the round trip).
inline unsigned ident_char_code(char c) {
  if (c >= 'a' && c <= 'z') return 1 + static_cast<unsigned>(c - 'a');
  if (c >= '0' && c <= '9') return 27 + static_cast<unsigned>(c - '0');
  if (c == '_') return 37;
  if (c == '$') return 38;
  if (c == '#') return 39;
  throw CodecError(std::string("ident_char_code: bad character '") + c + "'");
}

inline char ident_char_decode(unsigned d) {
  if (d >= 1 && d <= 26) return static_cast<char>('a' + (d - 1));
  if (d >= 27 && d <= 36) return static_cast<char>('0' + (d - 27));
  if (d == 37) return '_';
  if (d == 38) return '$';
  if (d == 39) return '#';
  throw CodecError("ident_char_decode: bad digit");
}

inline Nat encode_ident(const std::string& s) {
  Nat acc = 0;
  for (char c : s) acc = acc * 40 + ident_char_code(c);
  return acc;
}

inline std::string decode_ident(Nat n) {
  if (n == 0) throw CodecError("decode_ident: zero is not an identifier");
  std::string out;
  while (n > 0) {
    unsigned d = static_cast<unsigned>(n % 40);
    if (d == 0) throw CodecError("decode_ident: stray zero digit");
    out.push_back(ident_char_decode(d));
    n /= 40;
  }
  return std::string(out.rbegin(), out.rend());
}

// Deterministic 64-bit mixing, used for seeded pseudo-random oracles.
// Fixed algorithm (splitmix64) so verdicts are identical across platforms.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_nat(const Nat& n, std::uint64_t seed = 0) {
  std::uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ULL);
  Nat v = n;
  while (v > 0) {
    h = mix64(h ^ static_cast<std::uint64_t>(v & 0xffffffffffffffffULL));
    v >>= 64;
  }
  return mix64(h);
}

inline std::string nat_to_string(const Nat& n) { return n.str(); }

inline Nat nat_from_string(const std::string& s) {
  if (s.empty()) throw CodecError("nat_from_string: empty");
  for (char c : s)
    if (c < '0' || c > '9') throw CodecError("nat_from_string: bad digit");
  return Nat(s);
}

}  // namespace rk

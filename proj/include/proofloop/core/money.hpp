#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace proofloop {

// Exact USD amount stored as an integer count of picodollars (1e-12 USD).
// A price quoted to the micro-dollar per million tokens times an integer
// token count is always an integer number of picodollars, so ledger sums
// never drift.
class Usd {
 public:
  static constexpr std::int64_t kPicoPerDollar = 1'000'000'000'000;

  constexpr Usd() = default;
  static constexpr Usd from_pico(std::int64_t pico) { return Usd(pico); }
  static Usd from_cents(std::int64_t cents);
  // Parses a plain decimal such as "1920", "0.32" or "-3.5"; at most 12
  // fractional digits. Throws InvalidArgument.
  static Usd parse(std::string_view text);

  constexpr std::int64_t pico() const { return pico_; }

  // Exact decimal rendering with at least two fractional digits
  // ("10.00", "0.32", "0.000000125").
  std::string to_string() const;
  // Rounded half away from zero to whole cents ("933.64").
  std::string to_cents_string() const;

  Usd& operator+=(Usd other);
  friend Usd operator+(Usd a, Usd b) { return a += b; }
  friend Usd operator-(Usd a, Usd b);
  friend constexpr auto operator<=>(Usd, Usd) = default;

 private:
  explicit constexpr Usd(std::int64_t pico) : pico_(pico) {}
  std::int64_t pico_ = 0;
};

// Price in micro-dollars per million tokens. "$10/M" is 10'000'000.
class Rate {
 public:
  constexpr Rate() = default;
  static constexpr Rate from_micro_per_million(std::int64_t micro) { return Rate(micro); }
  // Parses a non-negative USD-per-million decimal ("10", "1.25", "0.42").
  static Rate parse(std::string_view usd_per_million);

  constexpr std::int64_t micro_per_million() const { return micro_; }
  std::string to_string() const;

  // Exact cost of `tokens` tokens at this rate. Throws InvalidArgument on
  // negative tokens or int64 overflow.
  Usd cost(std::int64_t tokens) const;

  friend constexpr auto operator<=>(Rate, Rate) = default;

 private:
  explicit constexpr Rate(std::int64_t micro) : micro_(micro) {}
  std::int64_t micro_ = 0;
};

}  // namespace proofloop

#include "proofloop/core/money.hpp"

#include <cctype>

#include "proofloop/core/errors.hpp"

namespace proofloop {
namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw InvalidArgument("monetary overflow");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw InvalidArgument("monetary overflow");
  return r;
}

// Parses "[-]digits[.digits]" into an integer scaled by 10^scale.
std::int64_t parse_scaled(std::string_view text, int scale, bool allow_negative) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (!s.empty() && s.front() == '$') s.remove_prefix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (negative && !allow_negative) throw InvalidArgument("negative value: " + std::string(text));
  if (s.empty()) throw InvalidArgument("empty decimal: '" + std::string(text) + "'");

  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_point) throw InvalidArgument("malformed decimal: " + std::string(text));
      seen_point = true;
      continue;
    }
    if (c == ',' && !seen_point) continue;  // thousands separator
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw InvalidArgument("malformed decimal: " + std::string(text));
    }
    any_digit = true;
    int d = c - '0';
    if (seen_point) {
      if (++frac_digits > scale) {
        throw InvalidArgument("too many fractional digits: " + std::string(text));
      }
      frac = frac * 10 + d;
    } else {
      whole = checked_add(checked_mul(whole, 10), d);
    }
  }
  if (!any_digit) throw InvalidArgument("malformed decimal: " + std::string(text));
  std::int64_t pow = 1;
  for (int i = 0; i < scale; ++i) pow *= 10;
  for (int i = frac_digits; i < scale; ++i) frac *= 10;
  std::int64_t v = checked_add(checked_mul(whole, pow), frac);
  return negative ? -v : v;
}

std::string render_scaled(std::int64_t v, int scale, int min_frac) {
  bool negative = v < 0;
  unsigned long long mag = negative ? 0ULL - static_cast<unsigned long long>(v)
                                    : static_cast<unsigned long long>(v);
  unsigned long long pow = 1;
  for (int i = 0; i < scale; ++i) pow *= 10;
  std::string frac = std::to_string(mag % pow);
  frac.insert(0, static_cast<std::size_t>(scale) - frac.size(), '0');
  while (static_cast<int>(frac.size()) > min_frac && frac.back() == '0') frac.pop_back();
  std::string out = negative ? "-" : "";
  out += std::to_string(mag / pow);
  if (!frac.empty()) out += "." + frac;
  return out;
}

}  // namespace

Usd Usd::from_cents(std::int64_t cents) { return Usd(checked_mul(cents, kPicoPerDollar / 100)); }

Usd Usd::parse(std::string_view text) { return Usd(parse_scaled(text, 12, true)); }

std::string Usd::to_string() const { return render_scaled(pico_, 12, 2); }

std::string Usd::to_cents_string() const {
  constexpr std::int64_t kPicoPerCent = kPicoPerDollar / 100;
  std::int64_t mag = pico_ < 0 ? -pico_ : pico_;
  std::int64_t cents = mag / kPicoPerCent;
  if ((mag % kPicoPerCent) * 2 >= kPicoPerCent) ++cents;
  return render_scaled(pico_ < 0 ? -cents : cents, 2, 2);
}

Usd& Usd::operator+=(Usd other) {
  pico_ = checked_add(pico_, other.pico_);
  return *this;
}

Usd operator-(Usd a, Usd b) { return Usd(checked_add(a.pico_, -b.pico_)); }

Rate Rate::parse(std::string_view usd_per_million) {
  return Rate(parse_scaled(usd_per_million, 6, false));
}

std::string Rate::to_string() const { return render_scaled(micro_, 6, 2); }

Usd Rate::cost(std::int64_t tokens) const {
  if (tokens < 0) throw InvalidArgument("negative token count");
  // tokens * (micro$ / 1e6 tokens) = tokens * micro * 1e-12 $ = picodollars.
  return Usd::from_pico(checked_mul(tokens, micro_));
}

}  // namespace proofloop

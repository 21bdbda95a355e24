#include "gpricing/types.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <string>

#include "gpricing/errors.hpp"

namespace gpricing {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                        std::chrono::day{day}};
  if (!ymd.ok()) {
    throw DataError("invalid calendar date " + std::to_string(year) + "-" + std::to_string(month) +
                    "-" + std::to_string(day));
  }
  days_ = ymd;
}

Date Date::parse(std::string_view text) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  char tail = 0;
  const std::string s(text);
  if (std::sscanf(s.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3) {
    throw DataError("malformed date '" + s + "' (expected YYYY-MM-DD)");
  }
  return Date(y, m, d);
}

std::string Date::str() const {
  const std::chrono::year_month_day ymd{days_};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string Date::month_key() const { return str().substr(0, 7); }

std::string_view to_string(OptionType t) { return t == OptionType::call ? "call" : "put"; }

OptionType parse_option_type(std::string_view text) {
  const std::string s = lower(text);
  if (s == "c" || s == "call") {
    return OptionType::call;
  }
  if (s == "p" || s == "put") {
    return OptionType::put;
  }
  throw DataError("unknown option type '" + std::string(text) + "'");
}

std::string_view to_string(Moneyness m) {
  switch (m) {
    case Moneyness::atm: return "ATM";
    case Moneyness::itm: return "ITM";
    case Moneyness::otm: return "OTM";
  }
  return "?";
}

Moneyness parse_moneyness(std::string_view text) {
  const std::string s = lower(text);
  if (s == "atm") {
    return Moneyness::atm;
  }
  if (s == "itm") {
    return Moneyness::itm;
  }
  if (s == "otm") {
    return Moneyness::otm;
  }
  throw ConfigError("unknown moneyness class '" + std::string(text) + "'");
}

std::string bucket_name(const Bucket& b) {
  return std::string(to_string(b.moneyness)) + "-" + std::string(to_string(b.type));
}

}  // namespace gpricing

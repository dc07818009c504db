#pragma once

// Donation strategies on a binary 1-D lattice and their Wolfram rule tables.
//
// A neighborhood (L, C, R) is indexed as L*4 + C*2 + R. The donor is the
// centre cell; its next state is High iff it donated to at least one
// neighbor.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace donation_ca {

enum class Reputation : std::uint8_t { Low = 0, High = 1 };

enum class Family : std::uint8_t { IGB, FS, RBA, Altruist };
enum class Direction : std::uint8_t { Both, LeftOnly, RightOnly };

struct StrategyDescriptor {
  Family family = Family::IGB;
  Direction direction = Direction::Both;
  bool hesitation = false;

  friend constexpr bool operator==(const StrategyDescriptor&, const StrategyDescriptor&) = default;
};

struct DonationDecision {
  double share_left = 0.0;
  double share_right = 0.0;

  constexpr double total() const { return share_left + share_right; }
  constexpr bool donated() const { return total() > 0.0; }

  friend constexpr bool operator==(const DonationDecision&, const DonationDecision&) = default;
};

constexpr unsigned neighborhood_index(Reputation left, Reputation centre, Reputation right) {
  return (static_cast<unsigned>(left) << 2) | (static_cast<unsigned>(centre) << 1) |
         static_cast<unsigned>(right);
}

constexpr Reputation left_of(unsigned neighborhood) {
  return static_cast<Reputation>((neighborhood >> 2) & 1u);
}
constexpr Reputation centre_of(unsigned neighborhood) {
  return static_cast<Reputation>((neighborhood >> 1) & 1u);
}
constexpr Reputation right_of(unsigned neighborhood) {
  return static_cast<Reputation>(neighborhood & 1u);
}

/// 8-entry neighborhood -> next-state table.
class RuleTable {
 public:
  constexpr RuleTable() = default;

  static constexpr RuleTable from_number(unsigned number) {
    RuleTable table;
    table.bits_ = static_cast<std::uint8_t>(number);
    return table;
  }

  constexpr unsigned number() const { return bits_; }
  constexpr bool bit(unsigned neighborhood) const { return (bits_ >> neighborhood) & 1u; }
  constexpr void set(unsigned neighborhood, bool value) {
    const auto mask = static_cast<std::uint8_t>(1u << neighborhood);
    bits_ = value ? static_cast<std::uint8_t>(bits_ | mask) : static_cast<std::uint8_t>(bits_ & ~mask);
  }

  constexpr Reputation next(Reputation left, Reputation centre, Reputation right) const {
    return bit(neighborhood_index(left, centre, right)) ? Reputation::High : Reputation::Low;
  }

  friend constexpr bool operator==(const RuleTable&, const RuleTable&) = default;

 private:
  std::uint8_t bits_ = 0;
};

/// Whether a donor of the given family may give to a neighbor. Altruists
/// are always eligible.
constexpr bool eligibility(Family family, Reputation donor, Reputation neighbor) {
  switch (family) {
    case Family::IGB:
      return neighbor == donor;
    case Family::FS:
      return donor == Reputation::Low && neighbor == Reputation::High;
    case Family::RBA:
      return static_cast<unsigned>(neighbor) >= static_cast<unsigned>(donor);
    case Family::Altruist:
      return true;
  }
  return false;
}

constexpr DonationDecision decide_donation(const StrategyDescriptor& desc, Reputation perceived_left,
                                           Reputation donor, Reputation perceived_right) {
  bool left = eligibility(desc.family, donor, perceived_left);
  bool right = eligibility(desc.family, donor, perceived_right);
  bool hesitant = desc.hesitation;
  if (desc.family == Family::Altruist) {
    hesitant = false;
  } else if (desc.direction == Direction::LeftOnly) {
    right = false;
  } else if (desc.direction == Direction::RightOnly) {
    left = false;
  }

  if (left && right) {
    if (hesitant) return {};
    return {0.5, 0.5};
  }
  if (left) return {1.0, 0.0};
  if (right) return {0.0, 1.0};
  return {};
}

constexpr RuleTable derive_rule_table(const StrategyDescriptor& desc) {
  RuleTable table;
  for (unsigned k = 0; k < 8; ++k) {
    table.set(k, decide_donation(desc, left_of(k), centre_of(k), right_of(k)).donated());
  }
  return table;
}

inline RuleTable rule_table_from_number(int number) {
  if (number < 0 || number > 255) {
    throw std::out_of_range("rule number must be in 0..255, got " + std::to_string(number));
  }
  return RuleTable::from_number(static_cast<unsigned>(number));
}

inline constexpr StrategyDescriptor kAltruist{Family::Altruist, Direction::Both, false};

/// The twelve evolvable strategies, in canonical order:
/// IGB (219, 195, 153), FS (50, 48, 34), RBA (251, 243, 187), then the
/// hesitant rules 90, 72, 18.
///
/// Rule 90 also describes hesitant rank-based assistance; (IGB, Both, h) is
/// its canonical descriptor.
inline constexpr std::array<StrategyDescriptor, 12> kCurated{{
    {Family::IGB, Direction::Both, false},
    {Family::IGB, Direction::LeftOnly, false},
    {Family::IGB, Direction::RightOnly, false},
    {Family::FS, Direction::Both, false},
    {Family::FS, Direction::LeftOnly, false},
    {Family::FS, Direction::RightOnly, false},
    {Family::RBA, Direction::Both, false},
    {Family::RBA, Direction::LeftOnly, false},
    {Family::RBA, Direction::RightOnly, false},
    {Family::IGB, Direction::Both, true},
    {Family::RBA, Direction::Both, true},
    {Family::FS, Direction::Both, true},
}};

inline std::vector<StrategyDescriptor> curated_strategies() {
  return {kCurated.begin(), kCurated.end()};
}

inline std::array<unsigned, 12> curated_rule_numbers() {
  std::array<unsigned, 12> out{};
  for (std::size_t i = 0; i < kCurated.size(); ++i) out[i] = derive_rule_table(kCurated[i]).number();
  return out;
}

/// Index into kCurated for a descriptor, if it is one of the twelve.
inline std::optional<std::size_t> curated_index(const StrategyDescriptor& desc) {
  for (std::size_t i = 0; i < kCurated.size(); ++i) {
    if (kCurated[i] == desc) return i;
  }
  return std::nullopt;
}

inline std::string_view to_string(Family family) {
  switch (family) {
    case Family::IGB: return "IGB";
    case Family::FS: return "FS";
    case Family::RBA: return "RBA";
    case Family::Altruist: return "ALT";
  }
  return "?";
}

inline std::string_view to_string(Direction direction) {
  switch (direction) {
    case Direction::Both: return "both";
    case Direction::LeftOnly: return "left";
    case Direction::RightOnly: return "right";
  }
  return "?";
}

/// FAMILY:DIRECTION[:h], e.g. "IGB:both", "RBA:left", "FS:both:h", "ALT".
inline std::string to_string(const StrategyDescriptor& desc) {
  if (desc.family == Family::Altruist) return "ALT";
  std::string out{to_string(desc.family)};
  out += ':';
  out += to_string(desc.direction);
  if (desc.hesitation) out += ":h";
  return out;
}

namespace detail {
inline std::string lower(std::string_view text) {
  std::string out{text};
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}
}  // namespace detail

inline StrategyDescriptor parse_strategy(std::string_view spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = spec.find(':', start);
    parts.push_back(detail::lower(spec.substr(start, colon - start)));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }

  auto fail = [&]() -> StrategyDescriptor {
    throw std::invalid_argument("invalid rule spec '" + std::string(spec) +
                                "', expected FAMILY:DIRECTION[:h]");
  };

  StrategyDescriptor desc;
  const auto& family = parts[0];
  if (family == "igb") desc.family = Family::IGB;
  else if (family == "fs") desc.family = Family::FS;
  else if (family == "rba") desc.family = Family::RBA;
  else if (family == "alt" || family == "altruist") desc.family = Family::Altruist;
  else return fail();

  if (desc.family == Family::Altruist) {
    if (parts.size() > 2) return fail();
    return kAltruist;
  }
  if (parts.size() < 2 || parts.size() > 3) return fail();

  const auto& dir = parts[1];
  if (dir == "both") desc.direction = Direction::Both;
  else if (dir == "left") desc.direction = Direction::LeftOnly;
  else if (dir == "right") desc.direction = Direction::RightOnly;
  else return fail();

  if (parts.size() == 3) {
    if (parts[2] != "h") return fail();
    desc.hesitation = true;
  }
  return desc;
}

}  // namespace donation_ca

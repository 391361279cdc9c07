#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qcommit/graph.hpp"

namespace qc {

enum class BloodType { O = 0, A = 1, B = 2, AB = 3 };

inline constexpr std::array<BloodType, 4> kBloodTypes{BloodType::O, BloodType::A, BloodType::B, BloodType::AB};

inline std::string_view to_string(BloodType t) {
  switch (t) {
    case BloodType::O: return "O";
    case BloodType::A: return "A";
    case BloodType::B: return "B";
    case BloodType::AB: return "AB";
  }
  return "?";
}

inline std::optional<BloodType> parse_blood_type(std::string_view s) {
  if (s == "O") return BloodType::O;
  if (s == "A") return BloodType::A;
  if (s == "B") return BloodType::B;
  if (s == "AB") return BloodType::AB;
  return std::nullopt;
}

/// A donor of type `donor` can give to a patient of type `patient`.
constexpr bool blood_type_compatible(BloodType patient, BloodType donor) {
  if (donor == BloodType::O || patient == BloodType::AB) return true;
  return patient == donor;
}

struct PairLabel {
  BloodType patient = BloodType::O;
  BloodType donor = BloodType::O;
  friend bool operator==(const PairLabel&, const PairLabel&) = default;
};

inline std::string to_string(const PairLabel& l) {
  return std::string(to_string(l.patient)) + "/" + std::string(to_string(l.donor));
}

inline std::optional<PairLabel> parse_pair_label(std::string_view s) {
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  auto p = parse_blood_type(s.substr(0, slash));
  auto d = parse_blood_type(s.substr(slash + 1));
  if (!p || !d) return std::nullopt;
  return PairLabel{*p, *d};
}

/// A graph plus optional per-node patient/donor labels.
struct Instance {
  WeightedGraph graph;
  std::vector<std::optional<PairLabel>> labels;  // empty, or one slot per node id
};

}  // namespace qc

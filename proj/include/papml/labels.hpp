#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace papml {

// The seven Herlev cell classes, in the conventional order. Integer class
// codes 1..7 in CSV files follow this order.
enum class CellClass {
  SuperficialSquamous = 0,
  IntermediateSquamous,
  Columnar,
  MildDysplasia,
  ModerateDysplasia,
  SevereDysplasia,
  CarcinomaInSitu,
};

inline constexpr std::size_t kNumCellClasses = 7;

inline constexpr std::array<CellClass, kNumCellClasses> all_cell_classes = {
    CellClass::SuperficialSquamous, CellClass::IntermediateSquamous,
    CellClass::Columnar,            CellClass::MildDysplasia,
    CellClass::ModerateDysplasia,   CellClass::SevereDysplasia,
    CellClass::CarcinomaInSitu,
};

enum class BinaryLabel { Normal = 0, Abnormal = 1 };

// Dysplasias and carcinoma-in-situ are abnormal; the three epithelial
// classes are normal.
constexpr BinaryLabel to_binary(CellClass c) {
  switch (c) {
    case CellClass::SuperficialSquamous:
    case CellClass::IntermediateSquamous:
    case CellClass::Columnar:
      return BinaryLabel::Normal;
    case CellClass::MildDysplasia:
    case CellClass::ModerateDysplasia:
    case CellClass::SevereDysplasia:
    case CellClass::CarcinomaInSitu:
      return BinaryLabel::Abnormal;
  }
  return BinaryLabel::Abnormal;  // unreachable
}

std::string_view cell_class_name(CellClass c);

// Accepts canonical names, the directory names used by the public Herlev
// distribution (e.g. "light_dysplastic"), and integer codes "1".."7".
std::optional<CellClass> parse_cell_class(std::string_view token);

std::string_view label_name(BinaryLabel l);

}  // namespace papml

#include "papml/labels.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace papml {

namespace {

std::string normalized(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (char ch : token) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (c == ' ' || c == '-') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  return out;
}

}  // namespace

std::string_view cell_class_name(CellClass c) {
  switch (c) {
    case CellClass::SuperficialSquamous: return "superficial_squamous_epithelial";
    case CellClass::IntermediateSquamous: return "intermediate_squamous_epithelial";
    case CellClass::Columnar: return "columnar_epithelial";
    case CellClass::MildDysplasia: return "mild_dysplasia";
    case CellClass::ModerateDysplasia: return "moderate_dysplasia";
    case CellClass::SevereDysplasia: return "severe_dysplasia";
    case CellClass::CarcinomaInSitu: return "carcinoma_in_situ";
  }
  return "unknown";
}

std::optional<CellClass> parse_cell_class(std::string_view token) {
  const std::string t = normalized(token);
  if (t.empty()) return std::nullopt;
  if (t.size() == 1 && t[0] >= '1' && t[0] <= '7') {
    return all_cell_classes[static_cast<std::size_t>(t[0] - '1')];
  }
  for (CellClass c : all_cell_classes) {
    if (t == cell_class_name(c)) return c;
  }
  // names used by the public Herlev image distribution
  if (t == "normal_superficiel" || t == "normal_superficial") return CellClass::SuperficialSquamous;
  if (t == "normal_intermediate") return CellClass::IntermediateSquamous;
  if (t == "normal_columnar") return CellClass::Columnar;
  if (t == "light_dysplastic" || t == "mild_dysplastic") return CellClass::MildDysplasia;
  if (t == "moderate_dysplastic") return CellClass::ModerateDysplasia;
  if (t == "severe_dysplastic") return CellClass::SevereDysplasia;
  if (t == "carcinoma_in_situ_intermediate") return CellClass::CarcinomaInSitu;
  return std::nullopt;
}

std::string_view label_name(BinaryLabel l) {
  return l == BinaryLabel::Normal ? "normal" : "abnormal";
}

}  // namespace papml

#include "dataset.hpp"

namespace doclab {

std::string_view split_label_name(SplitLabel label) {
  switch (label) {
    case SplitLabel::labeled: return "labeled";
    case SplitLabel::unlabeled: return "unlabeled";
    case SplitLabel::validation: return "validation";
  }
  return "labeled";
}

}  // namespace doclab

#include "screenml/model.hpp"

#include <string>

namespace screenml {

void check_fit_inputs(const Matrix& x, std::span<const int> y) {
  if (x.rows() == 0 || x.cols() == 0) throw Error(ErrorCode::EmptyInput, "empty training matrix");
  if (y.size() != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "label count " + std::to_string(y.size()) +
                                                  " != row count " + std::to_string(x.rows()));
  }
  for (int v : y) {
    if (v != 0 && v != 1) throw Error(ErrorCode::ParseError, "labels must be 0 or 1");
  }
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, "training matrix has non-finite values");
  }
}

void check_score_inputs(std::size_t expected_features, const Matrix& x) {
  if (x.rows() > 0 && x.cols() != expected_features) {
    throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(expected_features) +
                                                  " features, got " + std::to_string(x.cols()));
  }
}

void require_both_classes(std::span<const int> y) {
  bool pos = false;
  bool neg = false;
  for (int v : y) (v ? pos : neg) = true;
  if (!pos || !neg) throw Error(ErrorCode::SingleClass, "training labels contain a single class");
}

}  // namespace screenml

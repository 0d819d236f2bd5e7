#include "core/field.hpp"

#include <sstream>

#include "core/error.hpp"

namespace isleflow {

ScalarField2D::ScalarField2D(const Grid2D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    std::ostringstream msg;
    msg << "field payload has " << values_.size() << " values, grid expects "
        << grid_.size();
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
}

}  // namespace isleflow

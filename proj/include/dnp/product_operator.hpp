#pragma once

#include "dnp/spin_core.hpp"

#include <string>

namespace dnp {

// Product-operator expressions: terms of an optional coefficient and factors
// E<axis><k> (electron k, 1-based, index mandatory) and N<axis>, axis one of x y z + -.
// Examples: "Nz", "4Ez1Ez2Nz", "E+1-2E+1Ez2".
Operator parse_product_operator(const std::string& expr, int n_electrons);

}  // namespace dnp

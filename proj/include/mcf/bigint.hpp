#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace mcf {

using BigInt = boost::multiprecision::cpp_int;

} // namespace mcf

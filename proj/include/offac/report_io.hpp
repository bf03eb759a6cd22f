#ifndef OFFAC_REPORT_IO_HPP
#define OFFAC_REPORT_IO_HPP

// Text record of a fixed-point solve, used for golden files:
//
//   offac-fixed-point 1
//   kind <gtd|emphatic>
//   lambda <x>
//   features <n>
//   theta <n values>
//   A                    (n lines of n values)
//   b <n values>
//   condition <x>
//   residual <x>
//   end

#include "offac/oracle.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace offac {

void write_fixed_point(std::ostream& out, const FixedPointReport<double>& report);
FixedPointReport<double> read_fixed_point(std::istream& in);
std::vector<FixedPointReport<double>> read_fixed_points(std::istream& in);

}  // namespace offac

#endif  // OFFAC_REPORT_IO_HPP

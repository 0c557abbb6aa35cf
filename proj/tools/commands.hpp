#pragma once

#include <string>
#include <vector>

#include "ergolab/dynamics.hpp"

namespace ergolab::cli {

// text forms accepted on the command line and in config files
dyn::cplx parse_complex(const std::string& s);
dyn::TransformSpec parse_transform(const std::string& s);  // rotation(a, ...), cyclic(m, step), skew(alpha, beta)
dyn::Observable parse_observable(const std::string& s);    // char(..), const(c), fourier(k..: c; ..), box(lo:hi, ..),
                                                           // table(c, ..), cychar(m, k)
std::vector<long> parse_schedule(const std::vector<std::string>& items);  // accepts 1e6

// exit status: 0 ok, 2 verdict violation, 1 usage or evaluation error
int main(int argc, char** argv);

}  // namespace ergolab::cli

#include "rlwe/lattice.hpp"

namespace rlwe {

template LllResult<double> lll_reduce<double>(const Matrix<double>&, double);
template LatticeBundle<double> make_lattice_bundle<double>(const Matrix<double>&, int, double, SigmaMode, double);
template LatticeBundle<Real> make_lattice_bundle<Real>(const Matrix<Real>&, int, double, SigmaMode, double);

}  // namespace rlwe

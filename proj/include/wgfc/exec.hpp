// Execution policy for the data-parallel kernels.
//
// Every kernel that takes an Exec argument computes each output element by an
// order-fixed serial reduction, so the serial and parallel paths produce
// bit-identical results; tests compare them and the bench target times them.
#ifndef WGFC_EXEC_HPP
#define WGFC_EXEC_HPP

namespace wgfc {

enum class Exec { serial, parallel };

inline bool use_omp(Exec e) { return e == Exec::parallel; }

}  // namespace wgfc

#endif

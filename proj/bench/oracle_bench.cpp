#include "anomalylab/modeoracle.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>

#include <omp.h>

using namespace anomalylab;

int main(int argc, char** argv) {
  const int modes = argc > 1 ? std::atoi(argv[1]) : 16;
  const int trials = argc > 2 ? std::atoi(argv[2]) : 200;
  const std::uint64_t seed = 42;
  std::cout << "threads: " << omp_get_max_threads() << ", N = " << modes << ", trials = " << trials << "\n";
  struct Case {
    const char* model;
    const char* family;
  };
  bool same = true;
  for (Case c : {Case{"chiral_fermion", "L"}, Case{"free_boson", "Lplus"}, Case{"fj_chiral_boson", "L"}}) {
    Model m = builtin(c.model);
    auto t0 = std::chrono::steady_clock::now();
    OracleReport serial = cross_validate_serial(m, c.family, modes, trials, seed);
    auto t1 = std::chrono::steady_clock::now();
    OracleReport parallel = cross_validate(m, c.family, modes, trials, seed);
    auto t2 = std::chrono::steady_clock::now();
    double ts = std::chrono::duration<double>(t1 - t0).count();
    double tp = std::chrono::duration<double>(t2 - t1).count();
    bool eq = serial.max_rel_dev == parallel.max_rel_dev && serial.fitted == parallel.fitted;
    same = same && eq;
    std::cout << c.model << "/" << c.family << ": serial " << ts << " s, openmp " << tp << " s, speedup "
              << ts / tp << (eq ? "" : "  MISMATCH") << "\n";
  }
  return same ? 0 : 1;
}

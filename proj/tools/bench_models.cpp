// Compares the serial reference enumeration against the OpenMP kernels on the
// heavier corpus workloads.
#include <chrono>
#include <fstream>
#include <iostream>

#include "ausk/dsl.hpp"

using namespace ausk;
using Clock = std::chrono::steady_clock;

namespace {

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  if (!in) fail(ErrorKind::UsageError, "cannot open " + p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <typename Fn>
double timed_best_of(int reps, Fn&& fn) {
  double best = 1e18;
  for (int i = 0; i < reps; ++i) {
    auto t0 = Clock::now();
    fn();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  std::string corpus = argc > 1 ? argv[1] : "corpus";
  KernelOptions opts = default_kernel_options();
  Settings s;

  auto file = parse_dsl(slurp(corpus + "/grd.ausk"), "grd.ausk");
  Registry reg = elaborate_file(file, opts);
  ContextPtr grd = reg.context("GRD");
  ContextPtr pt = reg.context("GRD_PT");

  std::cout << "workload                      serial(ms)  parallel(ms)  results\n";
  auto row = [&](const char* name, auto serial_fn, auto parallel_fn, size_t n) {
    double ts = timed_best_of(3, serial_fn);
    double tp = timed_best_of(3, parallel_fn);
    std::printf("%-28s  %10.1f  %12.1f  %zu\n", name, ts, tp, n);
  };

  size_t n_grd = 0;
  row(
      "models GRD bound=2",
      [&] { n_grd = enumerate_strict_models(grd, s, ExecMode::Serial).size(); },
      [&] { n_grd = enumerate_strict_models(grd, s, ExecMode::Parallel).size(); }, n_grd);
  std::cout.flush();

  size_t n_pt = 0;
  row(
      "models GRD_PT bound=2",
      [&] { n_pt = enumerate_strict_models(pt, s, ExecMode::Serial).size(); },
      [&] { n_pt = enumerate_strict_models(pt, s, ExecMode::Parallel).size(); }, n_pt);

  GeometricExtension g = compile_geometric(grd, pt);
  auto base_models = enumerate_strict_models(grd, Settings{{"a", "b"}, 1, 4}, ExecMode::Parallel);
  size_t n_points = 0;
  row(
      "points over bound-1 bases",
      [&] {
        n_points = 0;
        for (const Model& m : base_models)
          n_points += enumerate_points(instantiate(g, m), s, ExecMode::Serial).size();
      },
      [&] {
        n_points = 0;
        for (const Model& m : base_models)
          n_points += enumerate_points(instantiate(g, m), s, ExecMode::Parallel).size();
      },
      n_points);

  // the two paths must agree byte for byte
  auto a = enumerate_strict_models(grd, s, ExecMode::Serial);
  auto b = enumerate_strict_models(grd, s, ExecMode::Parallel);
  bool same = a.size() == b.size();
  for (size_t i = 0; same && i < a.size(); ++i) same = a[i].text() == b[i].text();
  std::cout << "serial/parallel agreement: " << (same ? "ok" : "MISMATCH") << "\n";
  return same ? 0 : 1;
}

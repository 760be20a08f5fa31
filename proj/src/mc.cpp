#include "qdepol/mc.hpp"

#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "qdepol/errors.hpp"

namespace qdepol {

RealizationRotation RealizationRotation::from_field(const Vector3& r, Real t) {
  RealizationRotation rot;
  rot.magnitude = r.norm();
  rot.axis = rot.magnitude > 0 ? Vector3(r / rot.magnitude) : Vector3::UnitZ();
  rot.angle = 2.0 * rot.magnitude * t;
  return rot;
}

Matrix2c rotation_unitary(const Vector3& r, Real t) {
  const Real magnitude = r.norm();
  if (magnitude == 0) return Matrix2c::Identity();
  const Vector3 axis = r / magnitude;
  const Real c = std::cos(magnitude * t);
  const Real s = std::sin(magnitude * t);
  Matrix2c u = c * pauli(0);
  for (int i = 0; i < 3; ++i) u += Complex(0, s) * axis[i] * pauli(i + 1);
  return u;
}

DensityMatrix evolve_fixed_r(const DensityMatrix& rho0, const Vector3& r,
                             Real t) {
  if (rho0.dim() != 2) throw DimensionError("evolve_fixed_r expects a qubit");
  if (t < 0) throw ContractError("time must be nonnegative");
  const Real magnitude = r.norm();
  if (magnitude == 0) return rho0;

  const RealizationRotation rot = RealizationRotation::from_field(r, t);
  const Vector3 a = density_to_bloch(rho0).vec();
  const Real c = std::cos(rot.angle);
  const Real s = std::sin(rot.angle);
  // Rodrigues form of conjugation by rotation_unitary: the transverse part
  // turns by -angle about the axis, the parallel part is frozen.
  const Vector3 rotated = c * a + (1.0 - c) * rot.axis.dot(a) * rot.axis -
                          s * rot.axis.cross(a);

  Matrix2c m = 0.5 * pauli(0);
  for (int i = 0; i < 3; ++i) m += 0.5 * rotated[i] * pauli(i + 1);
  return DensityMatrix::trusted(m);
}

namespace {

constexpr long block_size = 4096;

struct BlockSums {
  ComplexMatrix sum;
  Eigen::MatrixXd sum_sq_re;
  Eigen::MatrixXd sum_sq_im;
  long count = 0;
};

// Pairwise reduction over [lo, hi) of a sample-indexed matrix getter.
template <typename Get>
ComplexMatrix pairwise(const Get& get, long lo, long hi) {
  if (hi - lo == 1) return get(lo);
  const long mid = lo + (hi - lo) / 2;
  return pairwise(get, lo, mid) + pairwise(get, mid, hi);
}

template <typename SampleFn>
BlockSums run_block(int dim, long count, const SampleFn& sample) {
  std::vector<ComplexMatrix> values;
  values.reserve(count);
  for (long i = 0; i < count; ++i) values.push_back(sample());

  BlockSums out;
  out.count = count;
  out.sum = pairwise([&](long i) -> ComplexMatrix { return values[i]; }, 0,
                     count);
  const auto squares = [&](long i) -> ComplexMatrix {
    ComplexMatrix sq(dim, dim);
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        const Complex z = values[i](a, b);
        sq(a, b) = Complex(z.real() * z.real(), z.imag() * z.imag());
      }
    }
    return sq;
  };
  const ComplexMatrix sq = pairwise(squares, 0, count);
  out.sum_sq_re = sq.real();
  out.sum_sq_im = sq.imag();
  return out;
}

// Runs blocks across threads; block -> result slot mapping is static, and the
// final combination walks blocks in index order, so worker count is invisible.
template <typename BlockFn>
McEstimate reduce_blocks(int dim, long samples, std::uint64_t seed,
                         int threads, const BlockFn& block_fn) {
  if (samples < 100) throw ContractError("need at least 100 samples");
  const long blocks = (samples + block_size - 1) / block_size;
  std::vector<BlockSums> partials(blocks);

  int workers = threads > 0
                    ? threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = static_cast<int>(std::min<long>(workers, blocks));

  std::atomic<long> next{0};
  auto worker = [&] {
    for (;;) {
      const long b = next.fetch_add(1);
      if (b >= blocks) return;
      const long lo = b * block_size;
      const long count = std::min(block_size, samples - lo);
      partials[b] = block_fn(b, count);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  Eigen::MatrixXd sq_re = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd sq_im = Eigen::MatrixXd::Zero(dim, dim);
  for (long b = 0; b < blocks; ++b) {
    sum += partials[b].sum;
    sq_re += partials[b].sum_sq_re;
    sq_im += partials[b].sum_sq_im;
  }

  McEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.mean = sum / static_cast<Real>(samples);
  const Real n = static_cast<Real>(samples);
  auto stderr_from = [&](const Eigen::MatrixXd& sq,
                         const Eigen::MatrixXd& mean) {
    Eigen::MatrixXd variance =
        (sq - n * mean.cwiseProduct(mean)) / (n - 1.0);
    return (variance.cwiseMax(0.0) / n).cwiseSqrt().eval();
  };
  est.stderr_re = stderr_from(sq_re, est.mean.real());
  est.stderr_im = stderr_from(sq_im, est.mean.imag());
  return est;
}

}  // namespace

Eigen::MatrixXd McEstimate::std_error() const {
  return (stderr_re.cwiseProduct(stderr_re) +
          stderr_im.cwiseProduct(stderr_im))
      .cwiseSqrt();
}

McEstimate mc_average(const NoiseModel& model, const DensityMatrix& rho0,
                      Real t, long samples, std::uint64_t seed, int threads) {
  if (rho0.dim() != 2) throw DimensionError("mc_average expects a qubit");
  return reduce_blocks(2, samples, seed, threads,
                       [&](long block, long count) {
                         Rng rng = Rng::for_block(seed, block);
                         return run_block(2, count, [&]() -> ComplexMatrix {
                           const Vector3 r = sample_r(model, rng);
                           return evolve_fixed_r(rho0, r, t).matrix();
                         });
                       });
}

McEstimate mc_average_two_qubit(const NoiseModel& model,
                                const DensityMatrix& rho0, Real t,
                                long samples, std::uint64_t seed,
                                int threads) {
  if (rho0.dim() != 4) {
    throw DimensionError("mc_average_two_qubit expects a 4x4 state");
  }
  return reduce_blocks(
      4, samples, seed, threads, [&](long block, long count) {
        Rng rng = Rng::for_block(seed, block);
        return run_block(4, count, [&]() -> ComplexMatrix {
          const Vector3 r1 = sample_r(model, rng);
          const Vector3 r2 = sample_r(model, rng);
          const Matrix2c u1 = rotation_unitary(r1, t);
          const Matrix2c u2 = rotation_unitary(r2, t);
          Matrix4c u;
          for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
              u.block<2, 2>(2 * i, 2 * j) = u1(i, j) * u2;
            }
          }
          return u * rho0.matrix() * u.adjoint();
        });
      });
}

}  // namespace qdepol

#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "newsflow/panel.hpp"

namespace newsflow::cwoe {

/// 2N x 2N correlation of the stacked [returns; polarities] data matrix,
/// returns block first.
struct PartitionedCorrelation {
  Eigen::Index n = 0;  // block dimension N
  Eigen::MatrixXd full;

  auto rr() const { return full.topLeftCorner(n, n); }
  auto pp() const { return full.bottomRightCorner(n, n); }
  auto rp() const { return full.topRightCorner(n, n); }
  auto pr() const { return full.bottomLeftCorner(n, n); }
};

/// C = (1/T) D D^T with D the stacked 2N x T normalized data matrix.
PartitionedCorrelation partition_correlation(const AlignedPanel& returns_panel,
                                             const AlignedPanel& polarity_panel);

/// Symmetric PSD square root via eigendecomposition; eigenvalues below 1e-10
/// are clamped to zero first. Throws NotPSD when min eigenvalue < -1e-8.
Eigen::MatrixXd matrix_sqrt_psd(const Eigen::Ref<const Eigen::MatrixXd>& matrix);

struct NoisySurrogate {
  Eigen::MatrixXd c_prime;  // 2N x 2N
  std::uint64_t seed = 0;
  Eigen::Index sample_length = 0;
};

/// White-noise counterpart of a partitioned correlation: stack
/// [sqrt(C_r) W1; sqrt(C_p) W2] with W1, W2 i.i.d. standard normal N x T
/// (W1 consumes the first N*T draws of the seeded stream, W2 the next) and
/// return C' = (1/T) (stack)(stack)^T.
NoisySurrogate synth_noisy(const Eigen::Ref<const Eigen::MatrixXd>& c_returns,
                           const Eigen::Ref<const Eigen::MatrixXd>& c_polarity,
                           Eigen::Index sample_length, std::uint64_t seed);

enum class StructureVariant { corresponding, neighboring };

/// Relative change of correlation structure between C and C'.
/// neighboring: mu = mean over row-adjacent off-diagonal pairs of
/// |c_{i,j} - c_{i,j+1}|; returns |mu(C') - mu(C)| / mu(C).
/// corresponding: mean |C'_{ij} - C_{ij}| / mean |C_{ij}| off-diagonal.
double structure_metric(const Eigen::Ref<const Eigen::MatrixXd>& c,
                        const Eigen::Ref<const Eigen::MatrixXd>& c_prime,
                        StructureVariant variant);

}  // namespace newsflow::cwoe

// SPDX-License-Identifier: Apache-2.0
#include "rdars/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rdars/error.hpp"

namespace rdars {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::DimensionMismatch:
    return "dimension_mismatch";
  case ErrorKind::InvalidInput:
    return "invalid_input";
  case ErrorKind::NotPositiveDefinite:
    return "not_positive_definite";
  case ErrorKind::CapExceeded:
    return "cap_exceeded";
  case ErrorKind::Config:
    return "config";
  case ErrorKind::Io:
    return "io";
  }
  return "unknown";
}

void throw_dimension_mismatch(std::string_view operand, long expected_rows, long expected_cols, long rows,
                              long cols) {
  throw Error(ErrorKind::DimensionMismatch,
              std::string(operand) + ": expected " + std::to_string(expected_rows) + "x" +
                  std::to_string(expected_cols) + ", got " + std::to_string(rows) + "x" + std::to_string(cols));
}

void SystemDims::validate() const {
  if (n_bs_antennas < 1 || n_users < 1 || n_elements < 1) {
    throw Error(ErrorKind::InvalidInput, "SystemDims: n_bs_antennas, n_users and n_elements must be >= 1");
  }
  if (n_connected < 0 || n_connected > n_elements) {
    throw Error(ErrorKind::InvalidInput, "SystemDims: n_connected must lie in [0, n_elements], got " +
                                             std::to_string(n_connected));
  }
}

namespace {

void check_shape(std::string_view name, const MatrixXcd &m, long rows, long cols) {
  if (m.rows() != rows || m.cols() != cols) {
    throw_dimension_mismatch(name, rows, cols, m.rows(), m.cols());
  }
}

} // namespace

void ChannelSet::validate(const SystemDims &dims) const {
  check_shape("h_direct", h_direct, dims.n_bs_antennas, dims.n_users);
  check_shape("h_ris", h_ris, dims.n_elements, dims.n_users);
  check_shape("g_bs", g_bs, dims.n_elements, dims.n_bs_antennas);
  if (power.size() != dims.n_users) {
    throw_dimension_mismatch("power", dims.n_users, 1, power.size(), 1);
  }
  if (!h_direct.allFinite() || !h_ris.allFinite() || !g_bs.allFinite() || !power.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "ChannelSet: non-finite channel or power entry");
  }
  if ((power.array() < 0.0).any()) {
    throw Error(ErrorKind::InvalidInput, "ChannelSet: negative transmit power");
  }
  if (!(noise_bs > 0.0) || !(noise_conn > 0.0) || !std::isfinite(noise_bs) || !std::isfinite(noise_conn)) {
    throw Error(ErrorKind::InvalidInput, "ChannelSet: noise variances must be positive and finite");
  }
}

void ChannelSet::validate() const {
  SystemDims dims{n_bs_antennas(), n_users(), n_elements(), 0};
  dims.validate();
  validate(dims);
}

MatrixXcd ChannelSet::weighted_direct() const {
  return h_direct * power.cwiseSqrt().cast<cplx>().asDiagonal();
}

MatrixXcd ChannelSet::weighted_ris() const { return h_ris * power.cwiseSqrt().cast<cplx>().asDiagonal(); }

ModeSelection ModeSelection::from_indices(int n_elements, std::vector<int> indices) {
  if (n_elements < 0) {
    throw Error(ErrorKind::InvalidInput, "ModeSelection: negative element count");
  }
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw Error(ErrorKind::InvalidInput, "ModeSelection: duplicate element index");
  }
  ModeSelection sel;
  sel.mask_.assign(static_cast<std::size_t>(n_elements), 0);
  for (int idx : indices) {
    if (idx < 0 || idx >= n_elements) {
      throw Error(ErrorKind::InvalidInput, "ModeSelection: index " + std::to_string(idx) + " out of range");
    }
    sel.mask_[static_cast<std::size_t>(idx)] = 1;
  }
  sel.indices_ = std::move(indices);
  return sel;
}

ModeSelection ModeSelection::from_mask(std::span<const std::uint8_t> mask) {
  std::vector<int> indices;
  for (std::size_t n = 0; n < mask.size(); ++n) {
    if (mask[n] > 1) {
      throw Error(ErrorKind::InvalidInput, "ModeSelection: mask entries must be 0 or 1");
    }
    if (mask[n] == 1) {
      indices.push_back(static_cast<int>(n));
    }
  }
  return from_indices(static_cast<int>(mask.size()), std::move(indices));
}

ModeSelection ModeSelection::first(int n_elements, int a) {
  if (a < 0 || a > n_elements) {
    throw Error(ErrorKind::InvalidInput, "ModeSelection: cannot connect " + std::to_string(a) + " of " +
                                             std::to_string(n_elements) + " elements");
  }
  std::vector<int> indices(static_cast<std::size_t>(a));
  for (int i = 0; i < a; ++i) {
    indices[static_cast<std::size_t>(i)] = i;
  }
  return from_indices(n_elements, std::move(indices));
}

VectorXd ModeSelection::mask_vector() const {
  VectorXd m(static_cast<Eigen::Index>(mask_.size()));
  for (std::size_t n = 0; n < mask_.size(); ++n) {
    m(static_cast<Eigen::Index>(n)) = mask_[n];
  }
  return m;
}

PhaseVector::PhaseVector(VectorXcd theta) : theta_(std::move(theta)) {
  for (Eigen::Index n = 0; n < theta_.size(); ++n) {
    if (!(std::abs(std::abs(theta_(n)) - 1.0) <= kModulusTol)) {
      throw Error(ErrorKind::InvalidInput,
                  "PhaseVector: entry " + std::to_string(n) + " is not unit modulus");
    }
  }
}

PhaseVector PhaseVector::ones(int n) { return PhaseVector(VectorXcd::Ones(n)); }

PhaseVector PhaseVector::from_angles(const VectorXd &angles) {
  VectorXcd theta(angles.size());
  for (Eigen::Index n = 0; n < angles.size(); ++n) {
    theta(n) = std::polar(1.0, angles(n));
  }
  return PhaseVector(std::move(theta));
}

} // namespace rdars

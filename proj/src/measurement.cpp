#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "cpnli/tomography.hpp"

namespace cpnli {

namespace {

using Ket2 = Eigen::Matrix<Complex, 2, 1>;

Ket2 analyzer(char setting) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (setting) {
    case 'H': return Ket2(1, 0);
    case 'V': return Ket2(0, 1);
    case 'D': return Ket2(s, s);
    case 'R': return Ket2(Complex(s, 0), Complex(0, -s));
    default: throw std::invalid_argument("unknown analyzer setting");
  }
}

std::array<Matrix2cd, 4> paulis() {
  std::array<Matrix2cd, 4> p;
  p[0] << 1, 0, 0, 1;
  p[1] << 0, 1, 1, 0;
  p[2] << 0, Complex(0, -1), Complex(0, 1), 0;
  p[3] << 1, 0, 0, -1;
  return p;
}

}  // namespace

ProjectorSet16 ProjectorSet16::standard() {
  constexpr char settings[] = {'H', 'V', 'D', 'R'};
  ProjectorSet16 out;
  std::size_t j = 0;
  for (char a : settings) {
    for (char b : settings) {
      const Ket2 ka = analyzer(a), kb = analyzer(b);
      Ket4d k;
      k << ka(0) * kb(0), ka(0) * kb(1), ka(1) * kb(0), ka(1) * kb(1);
      out.kets_.col(static_cast<Eigen::Index>(j)) = k;
      out.set_[j++] = Projector{std::string{a, b}, k * k.adjoint()};
    }
  }
  return out;
}

std::size_t ProjectorSet16::index_of(const std::string& label) const {
  for (std::size_t j = 0; j < set_.size(); ++j)
    if (set_[j].label == label) return j;
  throw std::invalid_argument("unknown projector label '" + label + "'");
}

Eigen::Matrix<double, 16, 16> ProjectorSet16::design_matrix() const {
  const auto p = paulis();
  Eigen::Matrix<double, 16, 16> a;
  for (int j = 0; j < 16; ++j)
    for (int k = 0; k < 16; ++k) a(j, k) = (set_[j].matrix * kron2(p[k / 4], p[k % 4])).trace().real();
  return a;
}

double ProjectorSet16::condition_number() const {
  Eigen::JacobiSVD<Eigen::Matrix<double, 16, 16>> svd(design_matrix());
  const auto& s = svd.singularValues();
  return s(15) > 0 ? s(0) / s(15) : std::numeric_limits<double>::infinity();
}

int ProjectorSet16::design_rank() const {
  Eigen::JacobiSVD<Eigen::Matrix<double, 16, 16>> svd(design_matrix());
  const auto& s = svd.singularValues();
  return static_cast<int>((s.array() > 1e-10 * s(0)).count());
}

Rates16 expected_rates(const DensityMatrix& rho, double brightness, const ProjectorSet16& projectors,
                       double background) {
  if (!(brightness > 0)) throw ValidationError("positive-brightness", "brightness must be > 0");
  Rates16 rates;
  for (std::size_t j = 0; j < 16; ++j) {
    const double p = (projectors[j].matrix * rho.matrix()).trace().real();
    rates[j] = brightness * std::max(p, 0.0) + background;
  }
  return rates;
}

DensityMatrix linear_inversion(std::span<const double, 16> counts, const ProjectorSet16& projectors,
                               double admixture) {
  const auto p = paulis();
  Eigen::Matrix<double, 16, 1> n;
  for (int j = 0; j < 16; ++j) n(j) = counts[static_cast<std::size_t>(j)];
  const Eigen::Matrix<double, 16, 1> y = projectors.design_matrix().partialPivLu().solve(n);
  Matrix4cd raw = Matrix4cd::Zero();
  for (int k = 0; k < 16; ++k) raw += y(k) * kron2(p[k / 4], p[k % 4]);
  const double tr = raw.trace().real();
  if (!(tr > 0) || !raw.allFinite()) return DensityMatrix::maximally_mixed();

  const auto eig = hermitian_eigen(raw / tr);
  Eigen::Vector4d lam = eig.values.cwiseMax(0.0);
  lam /= lam.sum();
  lam = (1.0 - admixture) * lam + Eigen::Vector4d::Constant(admixture / 4.0);
  return DensityMatrix::from_unnormalized(eig.vectors * lam.asDiagonal() * eig.vectors.adjoint());
}

std::int64_t CountRecord::total() const {
  std::int64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::array<double, 16> CountRecord::observations() const {
  std::array<double, 16> out;
  for (std::size_t j = 0; j < 16; ++j) out[j] = static_cast<double>(counts[j]);
  return out;
}

CountRecord simulate_counts(const Rates16& rates, double acquisition_time, std::uint64_t seed, long long bin) {
  CountRecord rec;
  rec.bin = bin;
  rec.acquisition_time = acquisition_time;
  rec.seed = seed;
  rec.rates = rates;
  std::mt19937_64 rng(seed);
  for (std::size_t j = 0; j < 16; ++j) {
    if (rates[j] < 0) throw ValidationError("non-negative-rate", "count rates must be >= 0");
    const double mean = rates[j] * acquisition_time;
    if (mean <= 0) {
      rec.counts[j] = 0;
      continue;
    }
    std::poisson_distribution<std::int64_t> poisson(mean);
    rec.counts[j] = poisson(rng);
  }
  return rec;
}

void write_counts(std::ostream& os, std::span<const CountRecord> records, const ProjectorSet16& projectors) {
  os << "bin,projector,rate_per_s,counts,time_s,seed\n";
  os << std::setprecision(17);
  for (const auto& r : records)
    for (std::size_t j = 0; j < 16; ++j)
      os << r.bin << ',' << projectors[j].label << ',' << r.rates[j] << ',' << r.counts[j] << ','
         << r.acquisition_time << ',' << r.seed << '\n';
}

std::vector<CountRecord> read_counts(std::istream& is, const ProjectorSet16& projectors) {
  std::string line;
  if (!std::getline(is, line) || line != "bin,projector,rate_per_s,counts,time_s,seed")
    throw std::runtime_error("count file: unexpected header '" + line + "'");

  std::vector<CountRecord> out;
  std::map<long long, std::size_t> slot;
  std::map<long long, int> filled;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string bin, label, rate, counts, time, seed;
    if (!std::getline(row, bin, ',') || !std::getline(row, label, ',') || !std::getline(row, rate, ',') ||
        !std::getline(row, counts, ',') || !std::getline(row, time, ',') || !std::getline(row, seed))
      throw std::runtime_error("count file: malformed row " + std::to_string(lineno));
    const long long b = std::stoll(bin);
    auto [it, fresh] = slot.try_emplace(b, out.size());
    if (fresh) {
      out.emplace_back();
      out.back().bin = b;
      out.back().acquisition_time = std::stod(time);
      out.back().seed = std::stoull(seed);
    }
    auto& rec = out[it->second];
    const std::size_t j = projectors.index_of(label);
    rec.rates[j] = std::stod(rate);
    rec.counts[j] = std::stoll(counts);
    ++filled[b];
  }
  for (const auto& [b, n] : filled)
    if (n != 16) throw std::runtime_error("count file: bin " + std::to_string(b) + " has " + std::to_string(n) + " rows");
  return out;
}

}  // namespace cpnli

#include "revstream/offline/ridge.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "revstream/error.hpp"

namespace revstream {

double RidgeModel::decision(std::span<const double> row) const {
  if (row.size() != weights.size()) throw InvalidArgument("ridge: row width mismatch");
  double v = intercept;
  for (std::size_t i = 0; i < row.size(); ++i) v += weights[i] * row[i];
  return v;
}

Label RidgeModel::predict(std::span<const double> row) const {
  return decision(row) > 0.0 ? Label::kRevert : Label::kNonRevert;
}

nlohmann::json RidgeModel::to_json() const {
  return {{"version", 1}, {"kind", "ridge"}, {"alpha", alpha}, {"intercept", intercept},
          {"weights", weights}};
}

RidgeModel RidgeModel::from_json(const nlohmann::json& j) {
  try {
    RidgeModel m;
    m.alpha = j.at("alpha").get<double>();
    m.intercept = j.at("intercept").get<double>();
    m.weights = j.at("weights").get<std::vector<double>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ridge model: ") + e.what());
  }
}

RidgeModel train_ridge(const Dataset& data, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("ridge alpha must be positive");
  if (data.size() == 0) throw InvalidArgument("cannot train on an empty dataset");
  const auto counts = data.class_counts();
  if (counts[0] == 0 || counts[1] == 0) {
    throw InvalidArgument("ridge needs both classes in the training data");
  }

  const auto n = static_cast<Eigen::Index>(data.size());
  const auto d = static_cast<Eigen::Index>(data.n_features());
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = data.features.row(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = row[static_cast<std::size_t>(j)];
    y(i) = data.labels[static_cast<std::size_t>(i)] == Label::kRevert ? 1.0 : -1.0;
  }

  // Centering leaves the intercept out of the penalty.
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  x.rowwise() -= x_mean;
  y.array() -= y_mean;

  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += alpha;
  const Eigen::VectorXd rhs = x.transpose() * y;

  Eigen::VectorXd w;
  bool solved = false;
  for (double jitter : {0.0, 1e-12}) {
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += jitter;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    if (ldlt.info() != Eigen::Success) continue;
    w = ldlt.solve(rhs);
    if (ldlt.info() == Eigen::Success && w.allFinite()) {
      solved = true;
      break;
    }
  }
  if (!solved) throw DataError("ridge system is singular");

  RidgeModel model;
  model.alpha = alpha;
  model.weights.assign(w.data(), w.data() + w.size());
  model.intercept = y_mean - x_mean.dot(w);
  return model;
}

}  // namespace revstream

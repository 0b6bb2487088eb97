#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <vector>

#include "stimrec/errors.hpp"
#include "stimrec/rng.hpp"
#include "stimrec/sigproc.hpp"
#include "stimrec/spectrogram.hpp"
#include "stimrec/thread_pool.hpp"

namespace stimrec {

// Row-sample design matrix: one row per time window, with the trial each row
// came from tracked so cross-validation can split by trial instead of row.
struct DesignMatrix {
    Eigen::MatrixXd values;                // [n_samples x n_features]
    std::vector<std::size_t> trial_of_row;

    void validate() const {
        if (static_cast<std::size_t>(values.rows()) != trial_of_row.size())
            throw data_error("design matrix: row/trial map size mismatch");
        if (!values.allFinite()) throw data_error("design matrix: non-finite entries");
    }
};

struct TargetMatrix {
    Eigen::MatrixXd values;  // [n_samples x n_outputs]

    void validate() const {
        if (!values.allFinite()) throw data_error("target matrix: non-finite entries");
    }
};

// Fitted ridge solution together with the training standardization, so
// prediction is self-contained.
struct RidgeModel {
    Eigen::MatrixXd beta;     // [n_features x n_outputs]
    double lambda = 0.0;
    Eigen::VectorXd x_mean;   // [n_features]
    Eigen::VectorXd x_scale;  // [n_features], always > 0
    Eigen::VectorXd y_mean;   // [n_outputs]
};

// Features X and targets Y for one trial (rows = windows).
struct TrialFeatures {
    Eigen::MatrixXd X;
    Eigen::MatrixXd Y;
};

// Lag-context embedding: row w concatenates spectrogram columns
// w-lags .. w+lags (reflect padding at the edges).  lags = 0 is the plain
// transpose, one row of band powers per window.
inline Eigen::MatrixXd embed_temporal(const BandSpectrogram& features, std::size_t lags) {
    const std::size_t n_windows = static_cast<std::size_t>(features.values.cols());
    const std::size_t n_bands = static_cast<std::size_t>(features.values.rows());
    if (lags >= n_windows) throw data_error("embed_temporal: lags must be < window count");
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n_windows),
                        static_cast<Eigen::Index>(n_bands * (2 * lags + 1)));
    for (std::size_t w = 0; w < n_windows; ++w) {
        Eigen::Index col = 0;
        for (long long lag = -static_cast<long long>(lags);
             lag <= static_cast<long long>(lags); ++lag) {
            const std::size_t src =
                detail::reflect_index(static_cast<long long>(w) + lag, n_windows);
            for (std::size_t b = 0; b < n_bands; ++b)
                out(static_cast<Eigen::Index>(w), col++) =
                    features.values(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(src));
        }
    }
    return out;
}

// Closed-form ridge: z-score X (population std; zero-variance columns get
// scale 1), center Y, then beta = (Xs'Xs + lambda I)^-1 Xs' Yc via an LDLT
// solve.  No intercept penalty: centering carries it.
inline RidgeModel ridge_fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double lambda) {
    if (X.rows() == 0) throw data_error("ridge_fit: empty design matrix");
    if (X.rows() != Y.rows()) throw data_error("ridge_fit: X/Y row mismatch");
    if (lambda < 0.0) throw data_error("ridge_fit: lambda must be nonnegative");
    if (!X.allFinite() || !Y.allFinite()) throw data_error("ridge_fit: non-finite input");

    const double n = static_cast<double>(X.rows());
    RidgeModel model;
    model.lambda = lambda;
    model.x_mean = X.colwise().mean();
    model.x_scale = ((X.rowwise() - model.x_mean.transpose()).array().square().colwise().sum() / n)
                        .sqrt()
                        .transpose();
    for (Eigen::Index j = 0; j < model.x_scale.size(); ++j)
        if (model.x_scale[j] == 0.0) model.x_scale[j] = 1.0;
    model.y_mean = Y.colwise().mean();

    const Eigen::MatrixXd Xs = (X.rowwise() - model.x_mean.transpose()).array().rowwise() /
                               model.x_scale.transpose().array();
    const Eigen::MatrixXd Yc = Y.rowwise() - model.y_mean.transpose();

    Eigen::MatrixXd gram = Xs.transpose() * Xs;
    gram.diagonal().array() += lambda;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
        throw numeric_error("ridge_fit: factorization failed");
    if (lambda == 0.0) {
        const auto d = ldlt.vectorD();
        const double dmax = d.cwiseAbs().maxCoeff();
        const double tol = static_cast<double>(gram.rows()) *
                           std::numeric_limits<double>::epsilon() * dmax;
        if (dmax == 0.0 || d.cwiseAbs().minCoeff() <= tol)
            throw numeric_error("ridge_fit: singular system at lambda 0");
    }
    model.beta = ldlt.solve(Xs.transpose() * Yc);
    if (!model.beta.allFinite()) throw numeric_error("ridge_fit: non-finite coefficients");
    return model;
}

inline RidgeModel ridge_fit(const DesignMatrix& X, const TargetMatrix& Y, double lambda) {
    X.validate();
    Y.validate();
    return ridge_fit(X.values, Y.values, lambda);
}

inline Eigen::MatrixXd ridge_predict(const RidgeModel& model, const Eigen::MatrixXd& X_new) {
    if (X_new.cols() != model.beta.rows())
        throw data_error("ridge_predict: feature count does not match model");
    const Eigen::MatrixXd Xs = (X_new.rowwise() - model.x_mean.transpose()).array().rowwise() /
                               model.x_scale.transpose().array();
    return (Xs * model.beta).rowwise() + model.y_mean.transpose();
}

// Inner k-fold cross-validation over TRIALS (not rows): trials are shuffled
// deterministically from the seed, split into k near-equal folds, and the
// grid value with minimal mean validation MSE wins; ties go to the larger
// lambda (the more regularized model).
inline double select_lambda(const DesignMatrix& X, const TargetMatrix& Y,
                            std::span<const double> grid, std::size_t k, std::uint64_t seed) {
    X.validate();
    Y.validate();
    if (X.values.rows() != Y.values.rows()) throw data_error("select_lambda: X/Y row mismatch");
    if (grid.empty()) throw data_error("select_lambda: empty grid");
    if (grid.size() == 1) return grid[0];

    const std::set<std::size_t> unique_trials(X.trial_of_row.begin(), X.trial_of_row.end());
    std::vector<std::size_t> trials(unique_trials.begin(), unique_trials.end());
    if (trials.size() < k) throw data_error("select_lambda: fewer trials than folds");

    Rng rng(seed);
    for (std::size_t i = trials.size() - 1; i > 0; --i)  // Fisher-Yates
        std::swap(trials[i], trials[static_cast<std::size_t>(rng.below(i + 1))]);

    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = trials.size() / k + (f < trials.size() % k ? 1 : 0);
        folds[f].assign(trials.begin() + static_cast<long>(pos),
                        trials.begin() + static_cast<long>(pos + size));
        pos += size;
    }

    const Eigen::Index n_features = X.values.cols();
    const Eigen::Index n_outputs = Y.values.cols();
    std::vector<double> mean_mse(grid.size(), 0.0);
    for (std::size_t f = 0; f < k; ++f) {
        const std::set<std::size_t> held(folds[f].begin(), folds[f].end());
        std::vector<Eigen::Index> train_rows, val_rows;
        for (std::size_t row = 0; row < X.trial_of_row.size(); ++row)
            (held.count(X.trial_of_row[row]) ? val_rows : train_rows)
                .push_back(static_cast<Eigen::Index>(row));

        Eigen::MatrixXd Xt(train_rows.size(), n_features), Yt(train_rows.size(), n_outputs);
        Eigen::MatrixXd Xv(val_rows.size(), n_features), Yv(val_rows.size(), n_outputs);
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            Xt.row(static_cast<Eigen::Index>(i)) = X.values.row(train_rows[i]);
            Yt.row(static_cast<Eigen::Index>(i)) = Y.values.row(train_rows[i]);
        }
        for (std::size_t i = 0; i < val_rows.size(); ++i) {
            Xv.row(static_cast<Eigen::Index>(i)) = X.values.row(val_rows[i]);
            Yv.row(static_cast<Eigen::Index>(i)) = Y.values.row(val_rows[i]);
        }

        for (std::size_t g = 0; g < grid.size(); ++g) {
            const RidgeModel model = ridge_fit(Xt, Yt, grid[g]);
            const double mse = (ridge_predict(model, Xv) - Yv).squaredNorm() /
                               static_cast<double>(Yv.size());
            mean_mse[g] += mse / static_cast<double>(k);
        }
    }

    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (mean_mse[g] < mean_mse[best] ||
            (mean_mse[g] == mean_mse[best] && grid[g] > grid[best]))
            best = g;
    return grid[best];
}

struct FoldResult {
    std::size_t trial_index = 0;
    Eigen::MatrixXd prediction;
    double lambda = 0.0;
    RidgeModel model;
};

// Outer leave-one-stimulus-out loop: every trial is held out once; the inner
// 5-fold lambda search and the final fit see only the other trials.  Folds
// are independent, so they may run on several threads; results are stored by
// trial index and do not depend on scheduling.
inline std::vector<FoldResult> loso_run(const std::vector<TrialFeatures>& trials,
                                        std::span<const double> grid, std::uint64_t seed,
                                        std::size_t n_threads = 1) {
    if (trials.size() < 6) throw data_error("loso_run: need at least 6 trials");
    for (const auto& trial : trials)
        if (trial.X.rows() != trial.Y.rows())
            throw data_error("loso_run: trial X/Y row mismatch");

    std::vector<FoldResult> results(trials.size());
    parallel_for(trials.size(), n_threads, [&](std::size_t t) {
        DesignMatrix X;
        TargetMatrix Y;
        Eigen::Index n_rows = 0;
        for (std::size_t i = 0; i < trials.size(); ++i)
            if (i != t) n_rows += trials[i].X.rows();
        X.values.resize(n_rows, trials[t].X.cols());
        Y.values.resize(n_rows, trials[t].Y.cols());
        X.trial_of_row.reserve(static_cast<std::size_t>(n_rows));
        Eigen::Index at = 0;
        for (std::size_t i = 0; i < trials.size(); ++i) {
            if (i == t) continue;
            X.values.middleRows(at, trials[i].X.rows()) = trials[i].X;
            Y.values.middleRows(at, trials[i].Y.rows()) = trials[i].Y;
            X.trial_of_row.insert(X.trial_of_row.end(),
                                  static_cast<std::size_t>(trials[i].X.rows()), i);
            at += trials[i].X.rows();
        }
        FoldResult& fold = results[t];
        fold.trial_index = t;
        fold.lambda = select_lambda(X, Y, grid, 5, mix_seed(seed, t));
        fold.model = ridge_fit(X.values, Y.values, fold.lambda);
        fold.prediction = ridge_predict(fold.model, trials[t].X);
    });
    return results;
}

}  // namespace stimrec

#pragma once

// Desk-scale oracle classifiers over feature or spectrum vectors:
// k-nearest-neighbor (majority vote, Euclidean) and nearest-centroid.
// Inputs are standardized per dimension with training statistics only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fdkit/error.hpp"

namespace fdkit {

enum class ClassifierKind { Knn, NearestCentroid };

struct FittedClassifier {
    ClassifierKind kind = ClassifierKind::NearestCentroid;
    std::size_t k = 1;                          // neighbors (Knn only)
    std::vector<std::vector<double>> train;     // standardized rows
    std::vector<int> labels;                    // class index per row
    std::vector<std::string> class_names;       // sorted unique label strings
    std::vector<double> dim_mean;               // training statistics
    std::vector<double> dim_std;                // 0 replaced by 1
    std::vector<std::vector<double>> centroids; // per class, standardized space

    std::size_t dims() const { return dim_mean.size(); }
};

inline FittedClassifier fit(const std::vector<std::vector<double>>& vectors,
                            const std::vector<std::string>& labels, ClassifierKind kind,
                            std::size_t k = 5) {
    if (vectors.empty() || labels.empty()) fail("EmptyClass", "no training examples");
    if (vectors.size() != labels.size())
        fail("DimensionMismatch", "vector and label counts differ");
    const std::size_t dims = vectors.front().size();
    if (dims == 0) fail("DimensionMismatch", "zero-dimensional training vectors");
    for (const auto& v : vectors)
        if (v.size() != dims) fail("DimensionMismatch", "training vectors have mixed lengths");
    if (kind == ClassifierKind::Knn) {
        if (k == 0) fail("InvalidParameter", "k must be at least 1");
        if (k > vectors.size()) fail("InvalidParameter", "k exceeds the training set size");
    }

    FittedClassifier model;
    model.kind = kind;
    model.k = k;

    std::set<std::string> names(labels.begin(), labels.end());
    model.class_names.assign(names.begin(), names.end());
    std::map<std::string, int> index_of;
    for (std::size_t i = 0; i < model.class_names.size(); ++i)
        index_of[model.class_names[i]] = static_cast<int>(i);

    model.dim_mean.assign(dims, 0.0);
    model.dim_std.assign(dims, 0.0);
    for (const auto& v : vectors)
        for (std::size_t d = 0; d < dims; ++d) model.dim_mean[d] += v[d];
    for (double& m : model.dim_mean) m /= static_cast<double>(vectors.size());
    for (const auto& v : vectors)
        for (std::size_t d = 0; d < dims; ++d) {
            const double diff = v[d] - model.dim_mean[d];
            model.dim_std[d] += diff * diff;
        }
    for (double& s : model.dim_std) {
        s = std::sqrt(s / static_cast<double>(vectors.size()));
        if (s == 0.0) s = 1.0;
    }

    model.train.reserve(vectors.size());
    model.labels.reserve(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        std::vector<double> row(dims);
        for (std::size_t d = 0; d < dims; ++d)
            row[d] = (vectors[i][d] - model.dim_mean[d]) / model.dim_std[d];
        model.train.push_back(std::move(row));
        model.labels.push_back(index_of[labels[i]]);
    }

    model.centroids.assign(model.class_names.size(), std::vector<double>(dims, 0.0));
    std::vector<std::size_t> counts(model.class_names.size(), 0);
    for (std::size_t i = 0; i < model.train.size(); ++i) {
        const int cls = model.labels[i];
        counts[static_cast<std::size_t>(cls)] += 1;
        for (std::size_t d = 0; d < dims; ++d)
            model.centroids[static_cast<std::size_t>(cls)][d] += model.train[i][d];
    }
    for (std::size_t c = 0; c < model.centroids.size(); ++c) {
        if (counts[c] == 0) fail("EmptyClass", "class " + model.class_names[c] + " has no examples");
        for (double& v : model.centroids[c]) v /= static_cast<double>(counts[c]);
    }
    return model;
}

namespace detail {

inline double sq_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

}  // namespace detail

inline std::string predict(const FittedClassifier& model, const std::vector<double>& vector) {
    if (vector.size() != model.dims())
        fail("DimensionMismatch", "query has " + std::to_string(vector.size()) + " dims, model has " +
                                      std::to_string(model.dims()));
    std::vector<double> q(model.dims());
    for (std::size_t d = 0; d < q.size(); ++d)
        q[d] = (vector[d] - model.dim_mean[d]) / model.dim_std[d];

    if (model.kind == ClassifierKind::NearestCentroid) {
        std::size_t best = 0;
        double best_d = detail::sq_distance(q, model.centroids[0]);
        for (std::size_t c = 1; c < model.centroids.size(); ++c) {
            const double d = detail::sq_distance(q, model.centroids[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        return model.class_names[best];
    }

    // kNN: k smallest distances, stable by (distance, row index)
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(model.train.size());
    for (std::size_t i = 0; i < model.train.size(); ++i)
        dist.emplace_back(detail::sq_distance(q, model.train[i]), i);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(model.k), dist.end());

    // majority vote; ties by smallest summed distance, then lowest class index
    std::map<int, std::pair<std::size_t, double>> votes;  // class -> (count, summed distance)
    for (std::size_t i = 0; i < model.k; ++i) {
        auto& [count, sum] = votes[model.labels[dist[i].second]];
        count += 1;
        sum += std::sqrt(dist[i].first);
    }
    int best_class = -1;
    std::size_t best_count = 0;
    double best_sum = 0.0;
    for (const auto& [cls, cs] : votes) {
        const auto& [count, sum] = cs;
        if (best_class < 0 || count > best_count ||
            (count == best_count && (sum < best_sum || (sum == best_sum && cls < best_class)))) {
            best_class = cls;
            best_count = count;
            best_sum = sum;
        }
    }
    return model.class_names[static_cast<std::size_t>(best_class)];
}

inline std::vector<std::string> predict_batch(const FittedClassifier& model,
                                              const std::vector<std::vector<double>>& vectors) {
    std::vector<std::string> out;
    out.reserve(vectors.size());
    for (const auto& v : vectors) out.push_back(predict(model, v));
    return out;
}

inline double accuracy_on(const FittedClassifier& model,
                          const std::vector<std::vector<double>>& vectors,
                          const std::vector<std::string>& labels) {
    if (vectors.size() != labels.size() || vectors.empty())
        fail("DimensionMismatch", "vectors and labels must pair up");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i)
        if (predict(model, vectors[i]) == labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(vectors.size());
}

}  // namespace fdkit

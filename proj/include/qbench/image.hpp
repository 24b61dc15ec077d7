#pragma once

#include <array>
#include <cstdint>

#include "qbench/metrics.hpp"
#include "qbench/optimizers.hpp"
#include "qbench/pipeline.hpp"

namespace qbench {

constexpr int kImagePixels = 28 * 28;

/// Binary 7-vs-9 image set: label 0 = digit 7, label 1 = digit 9.
struct ImageDataset {
    std::vector<std::array<std::uint8_t, kImagePixels>> images;
    std::vector<std::uint8_t> labels;  // 0 or 1
    std::vector<int> train_indices;
    std::vector<int> test_indices;

    std::size_t size() const { return images.size(); }
    /// Seeded shuffle split; test_count images held out, the rest train.
    void split(int test_count, std::uint64_t seed);
};

/// Parse IDX image/label files (magic 0x803 / 0x801, big-endian), keep only
/// digits 7 and 9. Throws on bad magic, truncation, or count mismatch.
ImageDataset load_mnist_idx(const std::string& image_path, const std::string& label_path);
ImageDataset parse_mnist_idx(const std::string& image_bytes, const std::string& label_bytes);

/// Synthetic stand-in with MNIST geometry: stroke-drawn 7s and 9s with seeded
/// jitter, usable wherever the real files are absent.
ImageDataset synthesize_digit_dataset(int count, std::uint64_t seed);
/// Serialize to IDX bytes (images, labels) with original digit labels 7/9.
std::pair<std::string, std::string> dataset_to_idx(const ImageDataset& ds);

struct PCAModel {
    Eigen::VectorXd mean;        // 784
    Eigen::MatrixXd components;  // n x 784, orthonormal rows
    std::vector<std::pair<double, double>> ranges;  // per-component (min,max) on train
};

PCAModel pca_fit(const ImageDataset& ds, const std::vector<int>& train_indices, int n);
/// Project and min-max scale to [0,1]; out-of-range projections are clipped.
std::vector<double> pca_encode(const PCAModel& model,
                               const std::array<std::uint8_t, kImagePixels>& image);

/// Product-state encoder: one XRot(2*pi*q_j) per qubit.
Circuit encode_circuit(const std::vector<double>& q);

/// Convolution-style ansatz: tournament tree of two-qubit blocks
/// B(a,b,c) = RY(a) on hi, RY(b) on lo, CX(hi->lo), RY(c) on lo; the lower
/// index survives each round, terminating at qubit 0. 3(n-1) parameters.
struct QcnnAnsatz {
    explicit QcnnAnsatz(int n);
    int n;
    std::vector<std::pair<int, int>> blocks;  // (hi, lo) per block
    int parameter_count() const { return 3 * static_cast<int>(blocks.size()); }
    /// Ansatz gates + measurement of qubit 0.
    Circuit circuit(const std::vector<double>& theta) const;
};

/// m = (1 - <Z_0>)/2 from the measured distribution of qubit 0.
double predict_from_distribution(const Distribution& d);
/// class 1 (digit 9) iff m > 0.5; ties go to class 0.
int classify(double m);

/// mean squared deviation between predictions and 0/1 labels
double mean_square_loss(const std::vector<double>& predictions,
                        const std::vector<std::uint8_t>& labels);

struct TrainConfig {
    BenchmarkConfig base;
    int qubits = 4;
    int iterations = 200;
    int batch_size = 50;
    int snapshot_interval = 10;
    int train_images = 200;  // images drawn from the train split (0 = all)
    SpsaConfig spsa;

    TrainConfig() { spsa.a = 1.0; }  // larger first steps suit the loss scale here
};

struct TrainState {
    std::vector<double> params;
    int iterations_done = 0;
    std::vector<double> loss_trace;
    std::vector<double> accuracy_trace;
    std::map<int, std::vector<double>> snapshots;  // iteration -> params
    PCAModel pca;
    MetricStore metrics{"image-recognition"};
};

TrainState train(const ImageDataset& ds, const TrainConfig& cfg);

/// Method 3: one execution per test image at fixed parameters.
std::pair<double, double> validate(const ImageDataset& ds, const PCAModel& pca,
                                   const std::vector<double>& params, const TrainConfig& cfg);

/// Method 1: encode + ansatz fidelity at seeded random parameters per width.
MetricStore run_image_method1(const ImageDataset& ds, const BenchmarkConfig& base);

}  // namespace qbench

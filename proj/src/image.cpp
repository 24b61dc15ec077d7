#include "qbench/image.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qbench/rng.hpp"

namespace qbench {

namespace {

std::uint32_t read_be32(const std::string& bytes, std::size_t offset) {
    if (offset + 4 > bytes.size()) throw std::invalid_argument("idx file truncated");
    return (std::uint32_t(std::uint8_t(bytes[offset])) << 24) |
           (std::uint32_t(std::uint8_t(bytes[offset + 1])) << 16) |
           (std::uint32_t(std::uint8_t(bytes[offset + 2])) << 8) |
           std::uint32_t(std::uint8_t(bytes[offset + 3]));
}

void write_be32(std::string& bytes, std::uint32_t v) {
    bytes.push_back(static_cast<char>((v >> 24) & 0xff));
    bytes.push_back(static_cast<char>((v >> 16) & 0xff));
    bytes.push_back(static_cast<char>((v >> 8) & 0xff));
    bytes.push_back(static_cast<char>(v & 0xff));
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void ImageDataset::split(int test_count, std::uint64_t seed) {
    if (test_count < 0 || test_count > static_cast<int>(images.size()))
        throw std::invalid_argument("bad test split size");
    std::vector<int> order(images.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    RngStream rng(derive_stream(seed, 0x5017));
    rng.shuffle(order);
    test_indices.assign(order.begin(), order.begin() + test_count);
    train_indices.assign(order.begin() + test_count, order.end());
}

ImageDataset parse_mnist_idx(const std::string& image_bytes, const std::string& label_bytes) {
    if (read_be32(image_bytes, 0) != 0x00000803)
        throw std::invalid_argument("bad magic in idx image file");
    if (read_be32(label_bytes, 0) != 0x00000801)
        throw std::invalid_argument("bad magic in idx label file");
    const std::uint32_t count = read_be32(image_bytes, 4);
    const std::uint32_t rows = read_be32(image_bytes, 8);
    const std::uint32_t cols = read_be32(image_bytes, 12);
    if (rows != 28 || cols != 28) throw std::invalid_argument("idx images must be 28x28");
    if (read_be32(label_bytes, 4) != count)
        throw std::invalid_argument("idx image/label counts differ");
    if (image_bytes.size() != 16 + std::size_t(count) * kImagePixels)
        throw std::invalid_argument("idx image file truncated");
    if (label_bytes.size() != 8 + std::size_t(count))
        throw std::invalid_argument("idx label file truncated");

    ImageDataset ds;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint8_t digit = static_cast<std::uint8_t>(label_bytes[8 + i]);
        if (digit != 7 && digit != 9) continue;
        std::array<std::uint8_t, kImagePixels> img;
        std::memcpy(img.data(), image_bytes.data() + 16 + std::size_t(i) * kImagePixels,
                    kImagePixels);
        ds.images.push_back(img);
        ds.labels.push_back(digit == 9 ? 1 : 0);
    }
    if (ds.images.empty()) throw std::runtime_error("no images with labels 7 or 9 found");
    return ds;
}

ImageDataset load_mnist_idx(const std::string& image_path, const std::string& label_path) {
    return parse_mnist_idx(slurp(image_path), slurp(label_path));
}

namespace {

void put(std::array<std::uint8_t, kImagePixels>& img, int r, int c, int v) {
    if (r < 0 || r >= 28 || c < 0 || c >= 28) return;
    img[r * 28 + c] = static_cast<std::uint8_t>(std::min(255, std::max(0, v)));
}

void thick_line(std::array<std::uint8_t, kImagePixels>& img, double r0, double c0, double r1,
                double c1, int thickness, int intensity) {
    const int steps = 48;
    for (int s = 0; s <= steps; ++s) {
        const double t = double(s) / steps;
        const double r = r0 + t * (r1 - r0);
        const double c = c0 + t * (c1 - c0);
        for (int dr = 0; dr < thickness; ++dr)
            for (int dc = 0; dc < thickness; ++dc)
                put(img, int(std::lround(r)) + dr, int(std::lround(c)) + dc, intensity);
    }
}

void ring(std::array<std::uint8_t, kImagePixels>& img, double rc, double cc, double radius,
          int thickness, int intensity) {
    const int steps = 72;
    for (int s = 0; s < steps; ++s) {
        const double a = 2 * M_PI * s / steps;
        const double r = rc + radius * std::sin(a);
        const double c = cc + radius * std::cos(a);
        for (int dr = 0; dr < thickness; ++dr)
            for (int dc = 0; dc < thickness; ++dc)
                put(img, int(std::lround(r)) + dr, int(std::lround(c)) + dc, intensity);
    }
}

}  // namespace

ImageDataset synthesize_digit_dataset(int count, std::uint64_t seed) {
    if (count < 2) throw std::invalid_argument("need at least 2 synthetic images");
    ImageDataset ds;
    RngStream rng(derive_stream(seed, 0xd161));
    for (int i = 0; i < count; ++i) {
        std::array<std::uint8_t, kImagePixels> img{};
        const int label = i % 2;
        const double dy = rng.uniform(-1.0, 1.0);
        const double dx = rng.uniform(-1.0, 1.0);
        const int thick = 2;
        const int ink = 205 + static_cast<int>(rng.uniform_int(51));
        if (label == 0) {
            // a seven at a fixed intermediate stroke weight
            const double scale = 0.92 + rng.uniform(-0.04, 0.04);
            thick_line(img, 5 + dy, 14 - 8 * scale + dx, 5 + dy, 14 + 7 * scale + dx, thick, ink);
            thick_line(img, 5 + dy, 14 + 7 * scale + dx, 5 + 17 * scale + dy, 14 - 5 * scale + dx,
                       thick, ink);
        } else {
            // nines come in two sizes straddling the sevens' ink mass
            const double scale = (i % 4 == 1 ? 0.65 : 1.3) + rng.uniform(-0.04, 0.04);
            ring(img, 10 + dy, 13 + dx, 4.5 * scale, thick, ink);
            thick_line(img, 10 + dy, 13 + 4.5 * scale + dx, 10 + 12 * scale + dy,
                       13 + 2 * scale + dx, thick, ink);
        }
        for (int k = 0; k < 8; ++k) {
            const int r = static_cast<int>(rng.uniform_int(28));
            const int c = static_cast<int>(rng.uniform_int(28));
            put(img, r, c, static_cast<int>(rng.uniform_int(50)));
        }
        ds.images.push_back(img);
        ds.labels.push_back(static_cast<std::uint8_t>(label));
    }
    return ds;
}

std::pair<std::string, std::string> dataset_to_idx(const ImageDataset& ds) {
    std::string images, labels;
    write_be32(images, 0x00000803);
    write_be32(images, static_cast<std::uint32_t>(ds.size()));
    write_be32(images, 28);
    write_be32(images, 28);
    for (const auto& img : ds.images)
        images.append(reinterpret_cast<const char*>(img.data()), kImagePixels);
    write_be32(labels, 0x00000801);
    write_be32(labels, static_cast<std::uint32_t>(ds.size()));
    for (std::uint8_t l : ds.labels) labels.push_back(static_cast<char>(l ? 9 : 7));
    return {images, labels};
}

PCAModel pca_fit(const ImageDataset& ds, const std::vector<int>& train_indices, int n) {
    if (train_indices.empty()) throw std::invalid_argument("pca_fit: empty training set");
    if (n < 1 || n > kImagePixels) throw std::invalid_argument("pca_fit: bad component count");
    const std::size_t m = train_indices.size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(kImagePixels);
    for (int idx : train_indices)
        for (int p = 0; p < kImagePixels; ++p) mean(p) += ds.images[idx][p] / 255.0;
    mean /= double(m);

    Eigen::MatrixXd centered(m, kImagePixels);
    for (std::size_t i = 0; i < m; ++i)
        for (int p = 0; p < kImagePixels; ++p)
            centered(i, p) = ds.images[train_indices[i]][p] / 255.0 - mean(p);
    Eigen::MatrixXd cov = centered.transpose() * centered / double(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw std::runtime_error("pca eigensolver failed");

    PCAModel model;
    model.mean = mean;
    model.components.resize(n, kImagePixels);
    for (int c = 0; c < n; ++c) {
        Eigen::VectorXd v = es.eigenvectors().col(kImagePixels - 1 - c);
        // deterministic sign: largest-magnitude entry positive
        int arg = 0;
        for (int p = 1; p < kImagePixels; ++p)
            if (std::abs(v(p)) > std::abs(v(arg))) arg = p;
        if (v(arg) < 0) v = -v;
        model.components.row(c) = v.transpose();
    }
    model.ranges.assign(n, {1e300, -1e300});
    for (std::size_t i = 0; i < m; ++i) {
        Eigen::VectorXd proj = model.components * centered.row(i).transpose();
        for (int c = 0; c < n; ++c) {
            model.ranges[c].first = std::min(model.ranges[c].first, proj(c));
            model.ranges[c].second = std::max(model.ranges[c].second, proj(c));
        }
    }
    return model;
}

std::vector<double> pca_encode(const PCAModel& model,
                               const std::array<std::uint8_t, kImagePixels>& image) {
    Eigen::VectorXd x(kImagePixels);
    for (int p = 0; p < kImagePixels; ++p) x(p) = image[p] / 255.0 - model.mean(p);
    Eigen::VectorXd proj = model.components * x;
    std::vector<double> q(model.components.rows());
    for (std::size_t c = 0; c < q.size(); ++c) {
        const auto [lo, hi] = model.ranges[c];
        if (hi - lo < 1e-12) {
            q[c] = 0.5;
            continue;
        }
        q[c] = std::clamp((proj(c) - lo) / (hi - lo), 0.0, 1.0);
    }
    return q;
}

Circuit encode_circuit(const std::vector<double>& q) {
    Circuit c(static_cast<int>(q.size()));
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (q[j] < 0.0 || q[j] > 1.0)
            throw std::invalid_argument("encode_circuit: feature out of [0,1]");
        c.xrot(2 * M_PI * q[j], static_cast<int>(j));
    }
    return c;
}

QcnnAnsatz::QcnnAnsatz(int n_) : n(n_) {
    if (n < 2) throw std::invalid_argument("qcnn ansatz needs n >= 2");
    std::vector<int> active(n);
    for (int i = 0; i < n; ++i) active[i] = i;
    while (active.size() > 1) {
        std::vector<int> next;
        for (std::size_t i = 0; i + 1 < active.size(); i += 2) {
            blocks.emplace_back(active[i + 1], active[i]);  // (hi, lo), lo survives
            next.push_back(active[i]);
        }
        if (active.size() % 2 == 1) next.push_back(active.back());
        active = std::move(next);
    }
}

Circuit QcnnAnsatz::circuit(const std::vector<double>& theta) const {
    if (static_cast<int>(theta.size()) != parameter_count())
        throw std::invalid_argument("qcnn ansatz: expected " + std::to_string(parameter_count()) +
                                    " parameters");
    Circuit c(n);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto [hi, lo] = blocks[b];
        c.ry(theta[3 * b], hi);
        c.ry(theta[3 * b + 1], lo);
        c.cx(hi, lo);
        c.ry(theta[3 * b + 2], lo);
    }
    c.measure(0, 0);
    return c;
}

double predict_from_distribution(const Distribution& d) {
    const double z = z_parity_expectation(d, {0});
    return (1.0 - z) / 2.0;
}

int classify(double m) { return m > 0.5 ? 1 : 0; }

double mean_square_loss(const std::vector<double>& predictions,
                        const std::vector<std::uint8_t>& labels) {
    if (predictions.empty()) throw std::invalid_argument("loss over an empty batch");
    if (predictions.size() != labels.size())
        throw std::invalid_argument("loss: prediction/label length mismatch");
    double s = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = double(labels[i]) - predictions[i];
        s += d * d;
    }
    return s / double(predictions.size());
}

namespace {

struct BatchCursor {
    std::vector<int> order;  // indices into the selected training pool
    std::size_t pos = 0;
    std::uint64_t seed;
    int epoch = 0;

    explicit BatchCursor(std::vector<int> pool, std::uint64_t seed_) : order(std::move(pool)), seed(seed_) {
        reshuffle();
    }
    void reshuffle() {
        RngStream rng(derive_stream(seed, 0xba7c + std::uint64_t(epoch)));
        rng.shuffle(order);
        ++epoch;
    }
    std::vector<int> next(std::size_t batch) {
        std::vector<int> out;
        out.reserve(batch);
        while (out.size() < batch) {
            if (pos >= order.size()) {
                reshuffle();
                pos = 0;
            }
            out.push_back(order[pos++]);
        }
        return out;
    }
};

}  // namespace

TrainState train(const ImageDataset& ds, const TrainConfig& cfg) {
    cfg.base.validate();
    if (cfg.batch_size < 1 || cfg.iterations < 0 || cfg.snapshot_interval < 1)
        throw std::invalid_argument("bad training configuration");
    if (ds.train_indices.empty())
        throw std::invalid_argument("dataset has no training split");

    std::vector<int> pool = ds.train_indices;
    if (cfg.train_images > 0 && cfg.train_images < static_cast<int>(pool.size()))
        pool.resize(cfg.train_images);

    TrainState state;
    state.pca = pca_fit(ds, pool, cfg.qubits);

    // features are fixed once the model is fit
    std::map<int, std::vector<double>> features;
    for (int idx : pool) features[idx] = pca_encode(state.pca, ds.images[idx]);

    QcnnAnsatz ansatz(cfg.qubits);
    RngStream init_rng(derive_stream(cfg.base.seed, 0x717e));
    std::vector<double> theta0(ansatz.parameter_count());
    for (auto& t : theta0) t = init_rng.uniform(-M_PI, M_PI);

    BatchCursor cursor(pool, cfg.base.seed);
    std::vector<int> batch;
    double cum_quantum = 0;
    double cum_elapsed = 0;
    std::uint64_t eval_counter = 0;
    auto wall = [] { return std::chrono::steady_clock::now(); };
    auto t_iter = wall();

    Objective objective = [&](const std::vector<double>& theta) {
        std::vector<double> preds;
        std::vector<std::uint8_t> labels;
        preds.reserve(batch.size());
        labels.reserve(batch.size());
        int correct = 0;
        for (int idx : batch) {
            Circuit circ = compose(encode_circuit(features.at(idx)),
                                   ansatz.circuit(theta));
            Distribution d;
            if (cfg.base.exact_probabilities) {
                d = run_ideal(circ, cfg.base.sim);
            } else {
                ExecutionResult r = run_noisy(circ, cfg.base.noise, cfg.base.shots,
                                              derive_stream(cfg.base.seed, ++eval_counter),
                                              cfg.base.sim);
                cum_quantum += r.t_quantum;
                d = std::move(r.probabilities);
            }
            const double m = predict_from_distribution(d);
            preds.push_back(m);
            labels.push_back(ds.labels[idx]);
            if (classify(m) == ds.labels[idx]) ++correct;
        }
        ObjectiveValue val;
        val.value = mean_square_loss(preds, labels);
        val.aux["loss"] = val.value;
        val.aux["accuracy"] = double(correct) / double(batch.size());
        val.aux["cum_quantum"] = cum_quantum;
        return val;
    };

    SpsaConfig spsa = cfg.spsa;
    spsa.max_iterations = cfg.iterations;
    std::vector<double> iter_elapsed;
    auto pre_iteration = [&](int) {
        batch = cursor.next(static_cast<std::size_t>(cfg.batch_size));
        const auto now = wall();
        iter_elapsed.push_back(std::chrono::duration<double>(now - t_iter).count());
        t_iter = now;
    };
    OptTrace trace = spsa_minimize(objective, theta0, spsa, cfg.base.seed, pre_iteration);

    state.params = trace.back().params;
    state.iterations_done = static_cast<int>(trace.size()) - 1;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        state.loss_trace.push_back(trace[k].value);
        state.accuracy_trace.push_back(trace[k].aux.at("accuracy"));
        if (k % static_cast<std::size_t>(cfg.snapshot_interval) == 0 || k + 1 == trace.size())
            state.snapshots[static_cast<int>(k)] = trace[k].params;
        MetricRecord rec;
        rec.group = cfg.qubits;
        rec.circuit_id = "train";
        rec.iteration = static_cast<int>(k);
        rec.app["loss"] = trace[k].value;
        rec.app["accuracy"] = trace[k].aux.at("accuracy");
        rec.app["cum_quantum"] = trace[k].aux.at("cum_quantum");
        rec.quantum_time = trace[k].aux.at("cum_quantum");
        cum_elapsed += (k + 1 < iter_elapsed.size() ? iter_elapsed[k + 1] : 0.0);
        rec.elapsed = cum_elapsed;
        rec.app["cum_elapsed"] = cum_elapsed;
        state.metrics.append(std::move(rec));
    }
    return state;
}

std::pair<double, double> validate(const ImageDataset& ds, const PCAModel& pca,
                                   const std::vector<double>& params, const TrainConfig& cfg) {
    if (ds.test_indices.empty()) throw std::invalid_argument("dataset has no test split");
    QcnnAnsatz ansatz(cfg.qubits);
    std::vector<double> preds;
    std::vector<std::uint8_t> labels;
    int correct = 0;
    std::uint64_t counter = 0;
    for (int idx : ds.test_indices) {
        Circuit circ = compose(encode_circuit(pca_encode(pca, ds.images[idx])),
                               ansatz.circuit(params));
        Distribution d;
        if (cfg.base.exact_probabilities) {
            d = run_ideal(circ, cfg.base.sim);
        } else {
            ExecutionResult r = run_noisy(circ, cfg.base.noise, cfg.base.shots,
                                          derive_stream(derive_stream(cfg.base.seed, 0x7e57),
                                                        ++counter),
                                          cfg.base.sim);
            d = std::move(r.probabilities);
        }
        const double m = predict_from_distribution(d);
        preds.push_back(m);
        labels.push_back(ds.labels[idx]);
        if (classify(m) == ds.labels[idx]) ++correct;
    }
    return {mean_square_loss(preds, labels),
            double(correct) / double(ds.test_indices.size())};
}

MetricStore run_image_method1(const ImageDataset& ds, const BenchmarkConfig& base) {
    base.validate();
    MetricStore store("image-recognition-method1");
    if (ds.images.empty()) throw std::invalid_argument("empty dataset");
    std::vector<int> pool = ds.train_indices;
    if (pool.empty()) {
        pool.resize(ds.size());
        for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<int>(i);
    }
    const int sample = pool.front();
    for (int n : base.widths()) {
        const auto t0 = std::chrono::steady_clock::now();
        PCAModel pca = pca_fit(ds, pool, n);
        QcnnAnsatz ansatz(n);
        RngStream rng(derive_stream(base.seed, 0x3e7 + std::uint64_t(n)));
        std::vector<double> theta(ansatz.parameter_count());
        for (auto& t : theta) t = rng.uniform(-M_PI, M_PI);
        Circuit body = compose(encode_circuit(pca_encode(pca, ds.images[sample])),
                               [&] {
                                   Circuit c = ansatz.circuit(theta);
                                   // fidelity over the full register: re-measure all
                                   Circuit stripped(c.width());
                                   for (const auto& inst : c.instructions())
                                       if (!std::holds_alternative<Measure>(inst))
                                           stripped.add(inst);
                                   stripped.measure_all();
                                   return stripped;
                               }());
        const double create =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ExecutionOutcome out = execute_circuit(body, base, derive_stream(base.seed, n), n,
                                               "ansatz_w" + std::to_string(n), create);
        store.append(std::move(out.record));
    }
    return store;
}

}  // namespace qbench

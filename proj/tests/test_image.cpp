#include <doctest.h>

#include <cmath>
#include <numeric>

#include "qbench/image.hpp"
#include "qbench/rng.hpp"

using namespace qbench;

namespace {

// IDX bytes with an arbitrary digit histogram; image content is noise
std::pair<std::string, std::string> fake_mnist(const std::vector<std::pair<int, int>>& digit_counts,
                                               std::uint64_t seed) {
    int total = 0;
    for (auto [digit, count] : digit_counts) total += count;
    std::string images, labels;
    auto be32 = [](std::string& s, std::uint32_t v) {
        for (int i = 3; i >= 0; --i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    be32(images, 0x803);
    be32(images, total);
    be32(images, 28);
    be32(images, 28);
    be32(labels, 0x801);
    be32(labels, total);
    RngStream rng(seed);
    std::vector<int> digits;
    for (auto [digit, count] : digit_counts)
        for (int i = 0; i < count; ++i) digits.push_back(digit);
    rng.shuffle(digits);
    for (int d : digits) {
        labels.push_back(static_cast<char>(d));
        for (int p = 0; p < kImagePixels; ++p)
            images.push_back(static_cast<char>(rng.uniform_int(256)));
    }
    return {images, labels};
}

}  // namespace

TEST_CASE("idx parsing filters to 7s and 9s") {
    auto [img, lab] = fake_mnist({{7, 5}, {9, 4}, {3, 6}, {0, 2}}, 1);
    ImageDataset ds = parse_mnist_idx(img, lab);
    CHECK(ds.size() == 9);
    int nines = 0;
    for (auto l : ds.labels) nines += l;
    CHECK(nines == 4);
}

TEST_CASE("idx parsing error paths") {
    auto [img, lab] = fake_mnist({{7, 3}}, 2);
    std::string bad_magic = img;
    bad_magic[3] = 0x04;
    CHECK_THROWS_AS(parse_mnist_idx(bad_magic, lab), std::invalid_argument);
    CHECK_THROWS_AS(parse_mnist_idx(img.substr(0, img.size() - 10), lab),
                    std::invalid_argument);
    std::string short_labels = lab;
    short_labels[7] = 2;  // count mismatch
    CHECK_THROWS_AS(parse_mnist_idx(img, short_labels), std::invalid_argument);
    auto [img39, lab39] = fake_mnist({{3, 4}}, 3);
    CHECK_THROWS_AS(parse_mnist_idx(img39, lab39), std::runtime_error);
}

TEST_CASE("mnist bookkeeping: 7/9 census and 50-image split") {
    // full-MNIST label histogram for 7s and 9s
    auto [img, lab] = fake_mnist({{7, 7293}, {9, 6958}, {1, 100}}, 4);
    ImageDataset ds = parse_mnist_idx(img, lab);
    CHECK(ds.size() == 14251);
    ds.split(50, 9);
    CHECK(ds.test_indices.size() == 50);
    CHECK(ds.train_indices.size() == 14201);
    // disjoint and exhaustive
    std::vector<char> seen(ds.size(), 0);
    for (int i : ds.test_indices) seen[i] += 1;
    for (int i : ds.train_indices) seen[i] += 1;
    for (char c : seen) CHECK(c == 1);
}

TEST_CASE("synthetic dataset round trips through idx") {
    ImageDataset ds = synthesize_digit_dataset(40, 5);
    auto [img, lab] = dataset_to_idx(ds);
    ImageDataset back = parse_mnist_idx(img, lab);
    CHECK(back.size() == 40);
    CHECK(back.labels == ds.labels);
    CHECK(back.images == ds.images);
}

TEST_CASE("pca components match a dense eigendecomposition oracle") {
    // small synthetic data with a known dominant direction
    ImageDataset ds;
    RngStream rng(8);
    for (int i = 0; i < 5; ++i) {
        std::array<std::uint8_t, kImagePixels> img{};
        img[0] = static_cast<std::uint8_t>(50 * i);
        img[1] = static_cast<std::uint8_t>(100 + 30 * i);
        img[2] = static_cast<std::uint8_t>(rng.uniform_int(5));
        ds.images.push_back(img);
        ds.labels.push_back(i % 2);
    }
    std::vector<int> idx{0, 1, 2, 3, 4};
    PCAModel model = pca_fit(ds, idx, 3);
    // orthonormal rows
    Eigen::MatrixXd gram = model.components * model.components.transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
    // dense oracle on the 3 informative coordinates
    Eigen::MatrixXd x(5, 3);
    for (int i = 0; i < 5; ++i)
        for (int p = 0; p < 3; ++p) x(i, p) = ds.images[i][p] / 255.0;
    Eigen::RowVector3d mu = x.colwise().mean();
    Eigen::MatrixXd c = (x.rowwise() - mu).transpose() * (x.rowwise() - mu) / 5.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    Eigen::VectorXd lead = es.eigenvectors().col(2);
    Eigen::VectorXd got = model.components.row(0).head(3).transpose();
    const double overlap = std::abs(lead.normalized().dot(got.normalized()));
    CHECK(overlap == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("projection of the mean image is zero before scaling") {
    ImageDataset ds = synthesize_digit_dataset(30, 6);
    std::vector<int> idx(30);
    std::iota(idx.begin(), idx.end(), 0);
    PCAModel model = pca_fit(ds, idx, 4);
    Eigen::VectorXd proj = model.components * Eigen::VectorXd::Zero(kImagePixels);
    CHECK(proj.cwiseAbs().maxCoeff() < 1e-12);
    // train features land in [0,1]
    for (int i : idx) {
        for (double q : pca_encode(model, ds.images[i])) {
            CHECK(q >= 0.0);
            CHECK(q <= 1.0);
        }
    }
}

TEST_CASE("pca refit is bit-identical") {
    ImageDataset ds = synthesize_digit_dataset(25, 7);
    std::vector<int> idx(25);
    std::iota(idx.begin(), idx.end(), 0);
    PCAModel a = pca_fit(ds, idx, 4);
    PCAModel b = pca_fit(ds, idx, 4);
    CHECK(a.components == b.components);
    CHECK(a.mean == b.mean);
}

TEST_CASE("encoder closed forms") {
    // q = 0 -> |0...0>
    Circuit c0 = encode_circuit({0.0, 0.0});
    c0.measure_all();
    Distribution d = run_ideal(c0);
    CHECK(d.at("00") == doctest::Approx(1.0));
    // q = 0.25 -> |1> with certainty on that qubit
    Circuit c1 = encode_circuit({0.25});
    c1.measure_all();
    d = run_ideal(c1);
    CHECK(d.at("1") == doctest::Approx(1.0));
    // q = 0.5 -> |0> up to global phase
    Circuit c2 = encode_circuit({0.5});
    c2.measure_all();
    d = run_ideal(c2);
    CHECK(d.at("0") == doctest::Approx(1.0));
    CHECK_THROWS_AS(encode_circuit({1.5}), std::invalid_argument);
}

TEST_CASE("qcnn tree terminates at qubit 0 with 3(n-1) parameters") {
    for (int n : {2, 3, 4, 5, 8}) {
        QcnnAnsatz a(n);
        CHECK(a.parameter_count() == 3 * (n - 1));
        CHECK(a.blocks.back().second == 0);
        for (auto [hi, lo] : a.blocks) CHECK(hi > lo);
    }
}

TEST_CASE("prediction mapping and tie break") {
    Distribution plus{{"0", 1.0}};
    CHECK(predict_from_distribution(plus) == doctest::Approx(0.0));
    CHECK(classify(0.0) == 0);
    Distribution minus{{"1", 1.0}};
    CHECK(predict_from_distribution(minus) == doctest::Approx(1.0));
    CHECK(classify(1.0) == 1);
    CHECK(classify(0.5) == 0);  // tie goes to class 0
}

TEST_CASE("theta = 0 on q = 0 input gives m = 0") {
    QcnnAnsatz a(3);
    std::vector<double> theta(a.parameter_count(), 0.0);
    Circuit c = compose(encode_circuit({0, 0, 0}), a.circuit(theta));
    CHECK(predict_from_distribution(run_ideal(c)) == doctest::Approx(0.0));
}

TEST_CASE("classification invariant under monotone rescale fixing threshold") {
    RngStream rng(12);
    for (int t = 0; t < 50; ++t) {
        double m = rng.uniform();
        // rescale z -> z^3 keeps the m = 0.5 point fixed and order intact
        double z = 1 - 2 * m;
        double m2 = (1 - z * z * z) / 2;
        CHECK(classify(m) == classify(m2));
    }
}

TEST_CASE("loss basics") {
    CHECK(mean_square_loss({1.0, 0.0}, {1, 0}) == doctest::Approx(0.0));
    CHECK(mean_square_loss({1.0}, {0}) == doctest::Approx(1.0));
    CHECK(mean_square_loss({0.5, 0.5}, {1, 0}) == doctest::Approx(0.25));
    CHECK_THROWS_AS(mean_square_loss({}, {}), std::invalid_argument);
}

TEST_CASE("training reduces loss on a learnable synthetic set") {
    ImageDataset ds = synthesize_digit_dataset(250, 21);
    ds.split(50, 3);
    TrainConfig cfg;
    cfg.qubits = 4;
    cfg.iterations = 120;
    cfg.batch_size = 50;
    cfg.train_images = 200;
    cfg.base.shots = 1000;
    cfg.base.seed = 17;
    TrainState state = train(ds, cfg);
    REQUIRE(state.loss_trace.size() == 121);
    double first = 0, last = 0;
    for (int i = 0; i < 10; ++i) {
        first += state.loss_trace[i];
        last += state.loss_trace[state.loss_trace.size() - 1 - i];
    }
    CHECK(last / 10 < first / 10);

    auto [test_loss, test_acc] = validate(ds, state.pca, state.params, cfg);
    CHECK(test_acc > 0.65);
    CHECK(test_loss < 0.5);
}

TEST_CASE("zero-iteration training holds theta0 only") {
    ImageDataset ds = synthesize_digit_dataset(60, 2);
    ds.split(10, 1);
    TrainConfig cfg;
    cfg.qubits = 2;
    cfg.iterations = 0;
    cfg.batch_size = 10;
    cfg.base.shots = 100;
    TrainState state = train(ds, cfg);
    CHECK(state.iterations_done == 0);
    CHECK(state.loss_trace.size() == 1);
    CHECK(state.snapshots.count(0) == 1);
}

TEST_CASE("batch cursor visits each index once per epoch") {
    ImageDataset ds = synthesize_digit_dataset(40, 3);
    ds.split(0, 1);
    TrainConfig cfg;
    cfg.qubits = 2;
    cfg.iterations = 0;
    cfg.batch_size = 40;
    cfg.base.shots = 50;
    TrainState state = train(ds, cfg);
    // with batch == training set, one iteration touches every image once;
    // exercised indirectly: the loss is finite and computed over 40 images
    CHECK(std::isfinite(state.loss_trace[0]));
}

TEST_CASE("perfect and random predictor baselines") {
    // perfect predictor stub
    std::vector<double> preds;
    std::vector<std::uint8_t> labels;
    RngStream rng(5);
    for (int i = 0; i < 200; ++i) {
        labels.push_back(static_cast<std::uint8_t>(i % 2));
        preds.push_back(labels.back());
    }
    CHECK(mean_square_loss(preds, labels) == doctest::Approx(0.0));
    int correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        correct += classify(preds[i]) == labels[i];
    CHECK(correct == 200);

    // random predictor hovers near chance on a balanced set
    correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        correct += classify(rng.uniform()) == labels[i];
    CHECK(std::abs(correct / 200.0 - 0.5) < 0.15);
}

TEST_CASE("method1 sweep records fidelity and growing depth") {
    ImageDataset ds = synthesize_digit_dataset(60, 11);
    ds.split(10, 2);
    BenchmarkConfig base;
    base.min_qubits = 2;
    base.max_qubits = 6;
    base.skip = 2;
    base.shots = 8000;
    MetricStore store = run_image_method1(ds, base);
    int prev_depth = -1;
    for (int g : store.groups()) {
        auto recs = store.group_records(g);
        REQUIRE(recs.size() == 1);
        CHECK(!recs[0]->failed);
        CHECK(recs[0]->normalized_fidelity >= 0.99);
        CHECK(recs[0]->algorithmic_depth > prev_depth);
        prev_depth = recs[0]->algorithmic_depth;
    }
}

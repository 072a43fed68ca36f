#include "fiinet/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "fiinet/engine/checkpoint.hpp"
#include "fiinet/engine/gradcheck.hpp"
#include "fiinet/error.hpp"
#include "fiinet/ingest/synthetic.hpp"
#include "fiinet/network/loss.hpp"
#include "fiinet/network/model.hpp"

namespace fiinet::cli {

namespace {

template <typename F>
decltype(auto) dispatch(Precision p, F&& f) {
    if (p == Precision::Float64) return f(double{});
    return f(float{});
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::ofstream open_output(const fs::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCategory::Io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorCategory::Io, "cannot write " + path.string());
    return os;
}

void finish(std::ofstream& os, const fs::path& path) {
    os.flush();
    if (!os) fail(ErrorCategory::Io, "write failed: " + path.string());
}

struct Loaded {
    RunConfig config;
    ingest::PreparedData data;
};

Loaded load(const fs::path& config_path) {
    Loaded l{read_run_config(config_path), {}};
    validate_paths(l.config);
    l.data = ingest::load_prepared(l.config.data_dir);
    return l;
}

template <typename Real>
ExperimentResult run_typed(const RunConfig& config, const ingest::PreparedData& data, std::ostream* metric_log,
                           network::Model<Real>* keep, const training::EpochCallback& on_epoch = {}) {
    network::Model<Real> model(data.vocab.schema(), config.model);
    ExperimentResult r;
    r.variant = std::string(network::variant_name(config.model.variant));
    r.embedding_dim = config.model.embedding_dim;
    r.train = training::train(model, data.split.train, data.split.valid, config.train, metric_log, on_epoch);
    r.test = training::evaluate(model, data.split.test);
    if (keep) *keep = std::move(model);
    return r;
}

template <typename Real>
network::Model<Real> load_model(const RunConfig& config, const ingest::PreparedData& data,
                                const fs::path& checkpoint) {
    auto ck = engine::load_checkpoint<Real>(checkpoint);
    network::Model<Real> model(data.vocab.schema(), config.model);
    model.check_compatible(ck.metadata);
    model.parameters().assign_values(ck.params);
    return model;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config, const ingest::PreparedData& data) {
    return dispatch(config.precision, [&](auto tag) {
        using Real = decltype(tag);
        return run_typed<Real>(config, data, nullptr, nullptr);
    });
}

int cmd_prepare(const PrepareArgs& args, std::ostream& out) {
    auto schema = ingest::read_schema_config(args.schema);
    if (args.threshold) schema.threshold = *args.threshold;
    if (!fs::exists(args.input)) fail(ErrorCategory::Io, "no such file: " + args.input.string());
    const auto table = ingest::read_table_file(args.input, schema.delimiter);
    const auto prepared = ingest::prepare_dataset(table, schema);
    ingest::save_prepared(args.out, prepared);

    out << "fields\t" << prepared.vocab.field_count() << '\n';
    for (const auto& fs : prepared.vocab.schema()) out << "cardinality\t" << fs.name << '\t' << fs.cardinality << '\n';
    out << "examples\ttrain=" << prepared.split.train.size() << " valid=" << prepared.split.valid.size()
        << " test=" << prepared.split.test.size() << '\n';
    return 0;
}

int cmd_synth(const SynthArgs& args, std::ostream& out) {
    ingest::PlantedConfig pc;
    pc.rows = args.rows;
    pc.fields = args.fields;
    pc.vocab = args.vocab;
    pc.seed = args.seed;
    const auto planted = ingest::make_planted_dataset(pc);
    auto os = open_output(args.out);
    ingest::write_table(os, planted.table, '\t');
    finish(os, args.out);
    std::size_t positives = 0;
    const std::size_t label = *planted.table.column("click");
    for (const auto& row : planted.table.rows) positives += row[label] == "1";
    out << "rows\t" << planted.table.rows.size() << '\n'
        << "positives\t" << positives << '\n'
        << "hot_pairs\t" << planted.hot_pairs.size() << '\n';
    return 0;
}

int cmd_train(const fs::path& config_path, std::ostream& out) {
    const auto [config, data] = load(config_path);
    const fs::path log_path = config.output_dir / "metrics.tsv";
    const fs::path ck_path = config.output_dir / "model.ckpt";
    auto log = open_output(log_path);
    auto on_epoch = [&](const training::MetricRecord& tr, const training::MetricRecord& va) {
        out << "epoch " << tr.epoch << " train_loss " << fmt(tr.logloss) << " valid_auc " << fmt(va.auc)
            << " valid_logloss " << fmt(va.logloss) << '\n';
        out.flush();
    };
    const auto r = dispatch(config.precision, [&](auto tag) {
        using Real = decltype(tag);
        network::Model<Real> model(data.vocab.schema(), config.model);
        auto result = run_typed<Real>(config, data, &log, &model, on_epoch);
        auto meta = model.metadata();
        meta["best_epoch"] = std::to_string(result.train.best_epoch);
        engine::save_checkpoint(ck_path, model.parameters(), meta);
        return result;
    });
    finish(log, log_path);
    out << "best_epoch\t" << r.train.best_epoch << '\n'
        << "test_auc\t" << fmt(r.test.auc) << '\n'
        << "test_logloss\t" << fmt(r.test.logloss) << '\n'
        << "checkpoint\t" << ck_path.string() << '\n'
        << "metric_log\t" << log_path.string() << '\n';
    return 0;
}

int cmd_eval(const fs::path& config_path, const fs::path& checkpoint, std::ostream& out) {
    const auto [config, data] = load(config_path);
    return dispatch(config.precision, [&](auto tag) {
        using Real = decltype(tag);
        const auto model = load_model<Real>(config, data, checkpoint);
        for (const auto& [name, split] : {std::pair{"valid", &data.split.valid}, std::pair{"test", &data.split.test}}) {
            const auto e = training::evaluate(model, *split);
            if (std::isnan(e.auc)) out << "warning: " << name << " split holds a single class; AUC omitted\n";
            out << name << "\tauc\t" << fmt(e.auc) << "\tlogloss\t" << fmt(e.logloss) << '\n';
        }
        return 0;
    });
}

int cmd_ablate(const fs::path& config_path, const std::vector<std::string>& variants, std::ostream& out) {
    const auto [config, data] = load(config_path);
    std::vector<network::Variant> order{network::Variant::FiiNet};
    for (const auto& v : variants) {
        const auto parsed = network::parse_variant(v);
        if (std::find(order.begin(), order.end(), parsed) == order.end()) order.push_back(parsed);
    }
    const fs::path path = config.output_dir / "ablation.tsv";
    auto os = open_output(path);
    const std::string header = "variant\tauc\tlogloss\tbest_epoch\n";
    os << header;
    out << header;
    for (auto v : order) {
        RunConfig c = config;
        c.model.variant = v;
        const auto r = run_experiment(c, data);
        const std::string row =
            r.variant + '\t' + fmt(r.test.auc) + '\t' + fmt(r.test.logloss) + '\t' + std::to_string(r.train.best_epoch) + '\n';
        os << row;
        out << row;
        out.flush();
    }
    finish(os, path);
    return 0;
}

int cmd_sweep_k(const fs::path& config_path, const std::vector<std::size_t>& dims, std::ostream& out) {
    const auto [config, data] = load(config_path);
    require(!dims.empty(), ErrorCategory::Config, "sweep-k: no dimensions given");
    const fs::path path = config.output_dir / "sweep_k.tsv";
    auto os = open_output(path);
    const std::string header = "embedding_dim\tauc\tlogloss\tbest_epoch\n";
    os << header;
    out << header;
    for (auto k : dims) {
        require(k >= 1, ErrorCategory::Config, "sweep-k: dimensions must be >= 1");
        RunConfig c = config;
        c.model.embedding_dim = k;
        const auto r = run_experiment(c, data);
        const std::string row = std::to_string(k) + '\t' + fmt(r.test.auc) + '\t' + fmt(r.test.logloss) + '\t' +
                                std::to_string(r.train.best_epoch) + '\n';
        os << row;
        out << row;
        out.flush();
    }
    finish(os, path);
    return 0;
}

int cmd_export_attention(const fs::path& config_path, const fs::path& checkpoint, std::ostream& out) {
    const auto [config, data] = load(config_path);
    const fs::path path = config.output_dir / "attention.tsv";
    dispatch(config.precision, [&](auto tag) {
        using Real = decltype(tag);
        const network::Model<Real> before(data.vocab.schema(), config.model);
        const auto after = load_model<Real>(config, data, checkpoint);
        const auto rows = network::export_attention(before, after, std::span(data.split.test));
        auto os = open_output(path);
        sk::write_attention_report(os, rows);
        finish(os, path);
        return 0;
    });
    out << "attention_report\t" << path.string() << '\n';
    return 0;
}

int cmd_gradcheck(const fs::path& config_path, std::ostream& out) {
    const auto [config, data] = load(config_path);
    network::Model<double> model(data.vocab.schema(), config.model);
    const auto& train = data.split.train;
    const std::span<const ingest::EncodedExample> batch(train.data(), std::min(train.size(), config.gradcheck_samples));
    const auto seed = engine::derive_seed(config.model.seed, "gradcheck");
    // Dropout stays active with a fixed mask so its backward rule is checked too.
    auto loss = [&](engine::GradientStore<double>* grads) {
        engine::Rng rng(seed);
        if (grads) return model.loss_and_gradient(batch, *grads, true, rng);
        engine::Tape<double> tape;
        auto o = model.forward(tape, batch, nullptr, true, &rng);
        std::vector<int> labels;
        for (const auto& e : batch) labels.push_back(e.label);
        return tape.value(network::bce_loss(tape, o.probs, labels))[0];
    };
    engine::GradCheckOptions opts;
    opts.eps = config.gradcheck_eps;
    opts.max_coords_per_group = config.gradcheck_coords;
    opts.seed = seed;
    const auto report = engine::finite_difference_check(model.parameters(), loss, opts);
    out << "group\tmax_rel_error\tcoords\tskipped\n";
    char buf[64];
    for (const auto& e : report) {
        std::snprintf(buf, sizeof buf, "%.3e", e.max_rel_error);
        out << e.name << '\t' << buf << '\t' << e.coords_checked << '\t' << e.coords_skipped << '\n';
    }
    const double worst = engine::max_relative_error(report);
    std::snprintf(buf, sizeof buf, "%.3e", worst);
    out << "max\t" << buf << '\n';
    if (!(worst < config.gradcheck_threshold))
        fail(ErrorCategory::Numeric, std::string("gradient check failed: max relative error ") + buf + " exceeds " +
                                         std::to_string(config.gradcheck_threshold));
    return 0;
}

}  // namespace fiinet::cli

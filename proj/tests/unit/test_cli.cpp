#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fiinet/cli/commands.hpp"
#include "fiinet/engine/checkpoint.hpp"
#include "helpers.hpp"

using namespace fiinet;
using namespace fiinet::cli;
using testutil::error_category;
using testutil::error_message;

namespace {

KeyValues kv_of(const std::string& text) {
    std::istringstream is(text);
    return parse_key_values(is, "test.conf");
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream(path) << text;
}

std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Small synthetic workspace: raw table, schema, prepared data and a run config.
struct Workspace {
    fs::path root;
    fs::path config;

    explicit Workspace(const std::string& name, const std::string& extra = "", int epochs = 3) {
        root = fs::temp_directory_path() / name;
        fs::remove_all(root);
        std::ostringstream sink;
        SynthArgs s;
        s.out = root / "raw.tsv";
        s.rows = 1200;
        s.fields = 4;
        cmd_synth(s, sink);
        write_file(root / "synthetic.schema", "label_column = click\nfield_columns = f0,f1,f2,f3\nthreshold = 0.5\n");
        cmd_prepare({root / "raw.tsv", root / "synthetic.schema", std::nullopt, root / "prepared"}, sink);
        config = root / "run.conf";
        write_file(config,
                   "data_dir = prepared\noutput_dir = out\nembedding_dim = 4\nhidden_sizes = 8\n"
                   "max_epochs = " + std::to_string(epochs) + "\npatience = 5\ndeterministic = true\n" + extra);
    }
    ~Workspace() { fs::remove_all(root); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FIINET_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run config parsing") {
    const auto c = parse_run_config(kv_of("data_dir = d\nvariant = sh\nhidden_sizes = 16, 4\nseed = 7\n"), "/base", "t");
    CHECK(c.data_dir == fs::path("/base/d"));
    CHECK(c.output_dir == fs::path("/base/out"));
    CHECK(c.model.variant == network::Variant::FiiNetSH);
    CHECK(c.model.hidden_sizes == std::vector<std::size_t>{16, 4});
    CHECK(c.model.seed == 7);
    CHECK(c.train.seed == 7);
    CHECK(c.train.batch_size == 256);
    CHECK(c.train.adam.learning_rate == 0.001356);
    CHECK(c.train.adam.weight_decay == 1e-5);
    CHECK(c.train.max_epochs == 500);
    CHECK(c.model.dropout == 0.2);
    CHECK(c.model.embedding_dim == 32);

    CHECK(error_message([] { parse_run_config(kv_of("data_dir = d\nlearning_rat = 0.1\n"), "/", "t"); })
              .find("learning_rat") != std::string::npos);
    CHECK(error_category([] { parse_run_config(kv_of("data_dir = d\ndropout = 1.5\n"), "/", "t"); }) ==
          ErrorCategory::Config);
    CHECK(error_category([] { parse_run_config(kv_of("data_dir = d\nbatch_size = -3\n"), "/", "t"); }) ==
          ErrorCategory::Config);
    CHECK(error_category([] { parse_run_config(kv_of("variant = fiinet\n"), "/", "t"); }) == ErrorCategory::Config);
    CHECK(error_category([] { parse_run_config(kv_of("data_dir = d\nseed = 1\nseed = 2\n"), "/", "t"); }) ==
          ErrorCategory::Config);

    const auto missing = parse_run_config(kv_of("data_dir = /nonexistent/prepared\n"), "/", "t");
    CHECK(error_category([&] { validate_paths(missing); }) == ErrorCategory::Io);
}

TEST_CASE("shipped configs parse") {
    const fs::path dir = fs::path(FIINET_SOURCE_DIR) / "configs";
    for (const char* name : {"synthetic", "bookcrossing", "kuairec"}) {
        CAPTURE(name);
        const auto schema = ingest::read_schema_config(dir / (std::string(name) + ".schema"));
        const auto run = read_run_config(dir / (std::string(name) + ".conf"));
        CHECK(run.model.variant == network::Variant::FiiNet);
        CHECK(run.train.adam.learning_rate == 0.001356);
        CHECK(schema.field_columns.size() >= 3);
    }
    CHECK(ingest::read_schema_config(dir / "bookcrossing.schema").threshold == 6.0);
    CHECK(ingest::read_schema_config(dir / "kuairec.schema").threshold == 3.0);
}

TEST_CASE("prepare reports fields and applies the threshold") {
    const fs::path root = fs::temp_directory_path() / "fiinet_cli_prepare";
    fs::remove_all(root);
    write_file(root / "ratings.csv", "user,isbn,rating\nu1,b1,5\nu2,b1,7\nu1,b2,7\nu3,b2,5\nu2,b3,9\nu3,b1,1\n");
    write_file(root / "bx.schema", "label_column = rating\nfield_columns = user,isbn\ndelimiter = comma\nthreshold = 3\n");

    std::ostringstream out;
    cmd_prepare({root / "ratings.csv", root / "bx.schema", 6.0, root / "prepared"}, out);
    CHECK(out.str().rfind("fields\t2\n", 0) == 0);
    const auto data = ingest::load_prepared(root / "prepared");
    std::size_t positives = 0, total = 0;
    for (const auto* part : {&data.split.train, &data.split.valid, &data.split.test})
        for (const auto& e : *part) {
            positives += e.label;
            ++total;
        }
    CHECK(total == 6);
    CHECK(positives == 3);

    write_file(root / "bad.schema", "label_column = rating\nfield_columns = user,genre\ndelimiter = comma\n");
    CHECK(error_message([&] { cmd_prepare({root / "ratings.csv", root / "bad.schema", {}, root / "p2"}, out); })
              .find("genre") != std::string::npos);
    CHECK(error_category([&] {
              cmd_prepare({root / "missing.csv", root / "bx.schema", {}, root / "p3"}, out);
          }) == ErrorCategory::Io);
    fs::remove_all(root);
}

TEST_CASE("train, eval and export attention") {
    Workspace ws("fiinet_cli_train");
    std::ostringstream out;
    CHECK(cmd_train(ws.config, out) == 0);
    const auto ck = ws.root / "out" / "model.ckpt";
    CHECK(fs::exists(ck));
    CHECK(fs::exists(ws.root / "out" / "metrics.tsv"));
    CHECK(out.str().find("test_auc\t") != std::string::npos);

    std::ostringstream ev;
    CHECK(cmd_eval(ws.config, ck, ev) == 0);
    CHECK(ev.str().find("test\tauc\t") != std::string::npos);

    std::ostringstream ex;
    CHECK(cmd_export_attention(ws.config, ck, ex) == 0);
    const auto report = read_file(ws.root / "out" / "attention.tsv");
    CHECK(report.rfind("channel_index\torder\tfield_tuple\tweight_before\tweight_after\n", 0) == 0);
    CHECK(std::count(report.begin(), report.end(), '\n') == 1 + 6 + 4);

    write_file(ws.root / "k8.conf", read_file(ws.config) + "embedding_dim = 8\n");
    CHECK(error_category([&] {
              std::ostringstream o;
              cmd_eval(ws.root / "k8.conf", ck, o);
          }) == ErrorCategory::Config);
}

TEST_CASE("repeated deterministic training is byte-identical") {
    Workspace ws("fiinet_cli_determinism");
    std::ostringstream a, b;
    cmd_train(ws.config, a);
    const auto log1 = read_file(ws.root / "out" / "metrics.tsv");
    const auto ck1 = read_file(ws.root / "out" / "model.ckpt");
    cmd_train(ws.config, b);
    CHECK(a.str() == b.str());
    CHECK(log1 == read_file(ws.root / "out" / "metrics.tsv"));
    CHECK(ck1 == read_file(ws.root / "out" / "model.ckpt"));
}

TEST_CASE("ablation and embedding sweep tables") {
    Workspace ws("fiinet_cli_ablate", "", 1);
    std::ostringstream out;
    CHECK(cmd_ablate(ws.config, kDefaultAblation, out) == 0);
    const auto table = read_file(ws.root / "out" / "ablation.tsv");
    CHECK(std::count(table.begin(), table.end(), '\n') == 5);
    for (const char* v : {"\nfiinet\t", "\nfiinet-sh\t", "\nfiinet-s\t", "\nfiinet-h\t"})
        CHECK(table.find(v) != std::string::npos);

    std::ostringstream sw;
    CHECK(cmd_sweep_k(ws.config, kDefaultSweepDims, sw) == 0);
    const auto sweep = read_file(ws.root / "out" / "sweep_k.tsv");
    CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 9);
    CHECK(sweep.find("\n48\t") != std::string::npos);
}

TEST_CASE("gradcheck on a tiny config") {
    Workspace ws("fiinet_cli_gradcheck", "precision = float64\ngradcheck_samples = 8\n");
    std::ostringstream out;
    CHECK(cmd_gradcheck(ws.config, out) == 0);
    CHECK(out.str().find("sk.A\t") != std::string::npos);

    write_file(ws.root / "strict.conf", read_file(ws.config) + "gradcheck_threshold = 1e-30\n");
    CHECK(error_category([&] {
              std::ostringstream o;
              cmd_gradcheck(ws.root / "strict.conf", o);
          }) == ErrorCategory::Numeric);
}

TEST_CASE("binary exit codes") {
    Workspace ws("fiinet_cli_exit");
    CHECK(run_cli("prepare --input /nonexistent.tsv --schema " + (ws.root / "synthetic.schema").string() +
                  " --out " + (ws.root / "x").string()) != 0);
    CHECK(run_cli("train --config /nonexistent.conf") != 0);
    CHECK(run_cli("gradcheck --config " + ws.config.string()) == 0);
    CHECK(run_cli("bogus") != 0);

    const std::string cmd = std::string(FIINET_CLI_PATH) + " train --config /nonexistent.conf 2>&1 >/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    char buf[256] = {};
    const bool got = std::fgets(buf, sizeof buf, pipe) != nullptr;
    pclose(pipe);
    CHECK(got);
    CHECK(std::string(buf).rfind("error: io: ", 0) == 0);
}

}  // TEST_SUITE

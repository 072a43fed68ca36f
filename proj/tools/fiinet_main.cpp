#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "fiinet/cli/commands.hpp"
#include "fiinet/error.hpp"

namespace {

int exit_code(fiinet::ErrorCategory c) {
    switch (c) {
        case fiinet::ErrorCategory::Input: return 2;
        case fiinet::ErrorCategory::Shape: return 3;
        case fiinet::ErrorCategory::Numeric: return 4;
        case fiinet::ErrorCategory::Config: return 5;
        case fiinet::ErrorCategory::Io: return 6;
        case fiinet::ErrorCategory::State: return 7;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace fiinet::cli;
    CLI::App app{"FiiNet CTR prediction"};
    app.require_subcommand(1);

    PrepareArgs prep;
    double threshold = 0.0;
    auto* prepare = app.add_subcommand("prepare", "Encode a raw table into vocabulary and splits");
    prepare->add_option("--input", prep.input, "Raw delimited table")->required();
    prepare->add_option("--schema", prep.schema, "Schema file")->required();
    auto* thr = prepare->add_option("--threshold", threshold, "Label threshold, overrides the schema");
    prepare->add_option("--out", prep.out, "Output directory")->required();

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic table with a planted field interaction");
    synth_cmd->add_option("--out", synth.out, "Output TSV")->required();
    synth_cmd->add_option("--rows", synth.rows, "Rows");
    synth_cmd->add_option("--fields", synth.fields, "Fields");
    synth_cmd->add_option("--vocab", synth.vocab, "Values per field");
    synth_cmd->add_option("--seed", synth.seed, "Seed");

    std::filesystem::path config, checkpoint;
    auto add_config = [&](CLI::App* sub) { sub->add_option("--config", config, "Run config")->required(); };
    auto add_checkpoint = [&](CLI::App* sub) {
        sub->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
    };

    auto* train = app.add_subcommand("train", "Train and write checkpoint plus metric log");
    add_config(train);
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the valid and test splits");
    add_config(eval);
    add_checkpoint(eval);

    std::string variants = "sh,s,h";
    auto* ablate = app.add_subcommand("ablate", "Train FiiNet and ablation variants side by side");
    add_config(ablate);
    ablate->add_option("--variants", variants, "Comma-separated variants");

    std::string dims = "6,12,18,24,30,36,42,48";
    auto* sweep = app.add_subcommand("sweep-k", "Train over a grid of embedding dimensions");
    add_config(sweep);
    sweep->add_option("--dims", dims, "Comma-separated embedding dimensions");

    auto* attention = app.add_subcommand("export-attention", "Write per-channel attention before and after training");
    add_config(attention);
    add_checkpoint(attention);

    auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of every parameter group");
    add_config(gradcheck);

    CLI11_PARSE(app, argc, argv);

    try {
        if (prepare->parsed()) {
            if (thr->count()) prep.threshold = threshold;
            return cmd_prepare(prep, std::cout);
        }
        if (synth_cmd->parsed()) return cmd_synth(synth, std::cout);
        if (train->parsed()) return cmd_train(config, std::cout);
        if (eval->parsed()) return cmd_eval(config, checkpoint, std::cout);
        if (ablate->parsed()) return cmd_ablate(config, fiinet::split_list(variants), std::cout);
        if (sweep->parsed()) return cmd_sweep_k(config, fiinet::parse_size_list("dims", dims), std::cout);
        if (attention->parsed()) return cmd_export_attention(config, checkpoint, std::cout);
        if (gradcheck->parsed()) return cmd_gradcheck(config, std::cout);
    } catch (const fiinet::Error& e) {
        std::cout.flush();
        std::cerr << "error: " << fiinet::category_name(e.category()) << ": " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cout.flush();
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

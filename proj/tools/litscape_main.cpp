#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "litscape/corpus.hpp"
#include "litscape/embedding.hpp"
#include "litscape/harvest.hpp"
#include "litscape/llmextract.hpp"
#include "litscape/manifold.hpp"
#include "litscape/pipeline.hpp"
#include "litscape/util/csv.hpp"
#include "litscape/util/xml.hpp"

namespace {

// exit codes: 1 usage/config, 2 missing dependency, 3 provider/transport,
// 4 data/parse, 5 internal
constexpr int kExitUsage = 1;
constexpr int kExitDependency = 2;
constexpr int kExitTransport = 3;
constexpr int kExitData = 4;
constexpr int kExitInternal = 5;

int run_stages(const std::string& config_path, const std::string& stage_arg,
               std::optional<std::uint64_t> seed, bool resume,
               std::optional<int> workers, const std::string& providers_path) {
    auto config = litscape::pipeline::RunConfig::load(config_path);
    if (!providers_path.empty())
        litscape::pipeline::merge_providers(config, providers_path);
    if (seed) {
        config.seed = *seed;
        config.projection.seed = *seed;
        config.projection_2d.seed = *seed + 1;
    }
    if (resume) config.resume = true;
    if (workers) config.workers = *workers;

    std::vector<litscape::pipeline::Stage> stages;
    if (stage_arg == "all") {
        stages = litscape::pipeline::all_stages();
    } else {
        stages = {litscape::pipeline::stage_from_name(stage_arg)};
    }
    auto manifest = litscape::pipeline::run(config, stages);
    std::fprintf(stderr, "[litscape] done; manifest at %s\n",
                 config.manifest_path().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"litscape: literature-landscape pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string stage_arg;
    bool resume = false;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string providers_path;

    std::vector<std::string> stage_names = {"all"};
    for (auto s : litscape::pipeline::all_stages())
        stage_names.push_back(std::string(litscape::pipeline::stage_name(s)));

    for (const auto& name : stage_names) {
        auto* cmd = app.add_subcommand(name, name == "all"
                                                 ? "run every stage in order"
                                                 : "run the " + name + " stage");
        cmd->add_option("--config", config_path, "run configuration JSON")->required();
        cmd->add_option("--seed", seed, "override the global seed");
        cmd->add_flag("--resume", resume, "skip records/stages already complete");
        cmd->add_option("--workers", workers, "bounded parallel fetch workers");
        cmd->add_option("--providers", providers_path,
                        "provider config path (merged into --config)");
        cmd->callback([name, &stage_arg] { stage_arg = name; });
    }

    auto* verify = app.add_subcommand("verify", "recompute manifest hashes");
    std::string verify_config;
    verify->add_option("--config", verify_config, "run configuration JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (verify->parsed()) {
            auto config = litscape::pipeline::RunConfig::load(verify_config);
            auto manifest =
                litscape::pipeline::RunManifest::load(config.manifest_path());
            auto mismatches = litscape::pipeline::verify_manifest(manifest, config.workdir);
            if (mismatches.empty()) {
                std::fprintf(stderr, "[litscape] manifest verified: all hashes match\n");
                return 0;
            }
            for (const auto& m : mismatches)
                std::fprintf(stderr, "[litscape] mismatch: %s\n", m.c_str());
            return kExitData;
        }
        return run_stages(config_path, stage_arg, seed, resume, workers, providers_path);
    } catch (const litscape::pipeline::DependencyError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDependency;
    } catch (const litscape::harvest::HarvestError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitTransport;
    } catch (const litscape::llmextract::LlmError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitTransport;
    } catch (const litscape::embedding::EmbeddingError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitTransport;
    } catch (const litscape::corpus::CorpusError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const litscape::csv::CsvError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const litscape::xml::XmlError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const litscape::pipeline::PipelineError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitInternal;
    }
}

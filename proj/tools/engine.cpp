// engine: anytime rule learning, rule application and evaluation for
// knowledge-graph completion.
//
//   engine learn -c learn.conf    mine rules, write <rule_prefix>-<seconds>
//   engine apply -c apply.conf    rank completions for the test triples
//   engine eval  -c eval.conf     score a prediction file

#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "kgrule/config.hpp"
#include "kgrule/evaluator.hpp"
#include "kgrule/generalize.hpp"
#include "kgrule/graph.hpp"
#include "kgrule/predictor.hpp"
#include "kgrule/scheduler.hpp"

namespace {

using namespace kgrule;

EngineConfig load_config(const std::string& path) {
    EngineConfig config = parse_config_file(path);
    finalize_config(config);
    return config;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

RewardStrategy reward_from(const std::string& name) {
    if (name == "s") return RewardStrategy::support;
    if (name == "s_times_c") return RewardStrategy::support_confidence;
    return RewardStrategy::support_confidence_decay;
}

SchedulingPolicy policy_from(const std::string& name) {
    if (name == "weighted") return SchedulingPolicy::weighted;
    if (name == "random") return SchedulingPolicy::random;
    if (name == "saturation") return SchedulingPolicy::saturation;
    return SchedulingPolicy::greedy;
}

LearnOptions learn_options(const EngineConfig& config) {
    LearnOptions opts;
    opts.scheduler.policy = policy_from(config.policy);
    opts.scheduler.epsilon = config.policy == "random" ? 1.0 : config.epsilon;
    opts.scheduler.reward_strategy = reward_from(config.reward);
    opts.scheduler.saturation_boundary = config.saturation_boundary;
    opts.scheduler.max_length_cyclic = config.max_length_cyclic;
    opts.scheduler.max_length_acyclic = config.max_length_acyclic;
    opts.grounding.exact = false;
    opts.grounding.sample_anchors = config.sample_anchors;
    opts.grounding.branch_limit = config.branch_limit;
    opts.grounding.pseudo_count = config.laplace;
    opts.grounding.object_identity = config.oi;
    opts.min_support = config.min_support;
    opts.min_confidence = config.min_confidence;
    opts.learn_binary = config.rule_types.find('b') != std::string::npos;
    opts.learn_unary_constant = config.rule_types.find("uc") != std::string::npos;
    opts.learn_unary_dangling = config.rule_types.find("ud") != std::string::npos;
    opts.max_attempts = config.max_attempts;
    opts.threads = config.threads;
    opts.seed = config.seed;
    opts.duration_seconds = config.duration;
    opts.snapshot_times = config.snapshots;
    opts.span_seconds = config.span_seconds;
    opts.span_ops = config.span_ops;
    return opts;
}

int run_learn(const std::string& config_path) {
    EngineConfig config = load_config(config_path);
    require(!config.train.empty(), "learn needs the 'train' key");

    auto dicts = std::make_shared<Dictionaries>();
    std::vector<Triple> triples = read_triples_file(config.train, *dicts);
    const EntityId self_id = ensure_self_entity(*dicts);
    const std::size_t rewritten = rewrite_self_loops(triples, self_id);
    if (rewritten > 0)
        std::cerr << "# rewrote " << rewritten << " self-loops to the 'self' constant\n";
    KnowledgeGraph train(std::move(triples), dicts);

    for (int t : config.snapshots)
        if (double(t) > config.duration + 1e-9)
            std::cerr << "# warning: snapshot " << t << " lies beyond duration "
                      << config.duration << " and will not be written\n";

    const LearnOptions opts = learn_options(config);
    auto sink = [&](int seconds, const RuleStore& store) {
        const std::string path = config.rule_prefix + "-" + std::to_string(seconds);
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path + " for writing");
        store.write(out, *dicts);
        out.flush();
        if (!out) throw std::runtime_error("failed writing " + path);
        std::cerr << "# snapshot " << path << " (" << store.size() << " rules)\n";
    };
    RuleStore store = run_learning(train, opts, sink, &std::cerr);
    std::cerr << "# learned " << store.size() << " rules\n";
    return 0;
}

int run_apply(const std::string& config_path) {
    EngineConfig config = load_config(config_path);
    require(!config.train.empty(), "apply needs the 'train' key");
    require(!config.test.empty(), "apply needs the 'test' key");
    require(!config.rules.empty(), "apply needs the 'rules' key");
    require(!config.predictions.empty(), "apply needs the 'predictions' key");

    auto dicts = std::make_shared<Dictionaries>();
    std::vector<Triple> train_triples = read_triples_file(config.train, *dicts);
    std::vector<Triple> valid_triples;
    if (!config.valid.empty()) valid_triples = read_triples_file(config.valid, *dicts);
    std::vector<Triple> test_triples = read_triples_file(config.test, *dicts);

    const EntityId self_id = ensure_self_entity(*dicts);
    rewrite_self_loops(train_triples, self_id);
    rewrite_self_loops(valid_triples, self_id);
    KnowledgeGraph train(std::move(train_triples), dicts);

    RuleIndex rules(read_rules_file(config.rules, *dicts), dicts->relations.size());

    ApplyOptions opts;
    opts.top_k = config.top_k;
    opts.object_identity = config.oi;
    if (config.blocking == "on")
        opts.blocking = true;
    else if (config.blocking == "off")
        opts.blocking = false;
    else
        opts.blocking = validation_blocks(train, valid_triples);
    std::cerr << "# applying " << rules.size() << " rules, blocking "
              << (opts.blocking ? "on" : "off") << "\n";

    std::vector<TriplePredictions> predictions;
    predictions.reserve(test_triples.size());
    for (std::size_t i = 0; i < test_triples.size(); ++i) {
        const Triple& t = test_triples[i];
        TriplePredictions tp{t, {}, {}};
        tp.heads = predict(train, rules, {t.relation, t.object, QuerySide::head}, opts);
        tp.tails = predict(train, rules, {t.relation, t.subject, QuerySide::tail}, opts);
        predictions.push_back(std::move(tp));
        if ((i + 1) % 500 == 0)
            std::cerr << "# " << (i + 1) << "/" << test_triples.size() << " test triples\n";
    }

    std::ofstream out(config.predictions);
    if (!out) throw std::runtime_error("cannot open " + config.predictions + " for writing");
    write_predictions(out, predictions, *dicts, self_id);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + config.predictions);
    return 0;
}

int run_eval(const std::string& config_path) {
    EngineConfig config = load_config(config_path);
    require(!config.train.empty(), "eval needs the 'train' key");
    require(!config.test.empty(), "eval needs the 'test' key");
    require(!config.predictions.empty(), "eval needs the 'predictions' key");

    auto dicts = std::make_shared<Dictionaries>();
    std::vector<Triple> train_triples = read_triples_file(config.train, *dicts);
    std::vector<Triple> valid_triples;
    if (!config.valid.empty()) valid_triples = read_triples_file(config.valid, *dicts);
    std::vector<Triple> test_triples = read_triples_file(config.test, *dicts);

    FilterIndex filter;
    filter.add(train_triples);
    filter.add(valid_triples);
    filter.add(test_triples);
    filter.finalize();

    PredictionSet predictions = read_predictions_file(config.predictions, *dicts);

    EvalOptions opts;
    opts.hits_at = config.k_list;
    opts.per_relation = config.per_relation;
    EvalReport report = evaluate(predictions, test_triples, filter, *dicts, opts);
    if (report.missing > 0)
        std::cerr << "# warning: " << report.missing
                  << " test triples had no predictions and count as misses\n";

    if (config.report.empty()) {
        write_report(std::cout, report);
    } else {
        std::ofstream out(config.report);
        if (!out) throw std::runtime_error("cannot open " + config.report + " for writing");
        write_report(out, report);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anytime bottom-up rule learning for knowledge-graph completion"};
    app.require_subcommand(1);

    std::string learn_config, apply_config, eval_config;
    CLI::App* learn = app.add_subcommand("learn", "mine rules from a training graph");
    learn->add_option("-c,--config", learn_config, "configuration file")->required();
    CLI::App* apply = app.add_subcommand("apply", "apply rules to rank test completions");
    apply->add_option("-c,--config", apply_config, "configuration file")->required();
    CLI::App* eval = app.add_subcommand("eval", "evaluate a prediction file");
    eval->add_option("-c,--config", eval_config, "configuration file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (learn->parsed()) return run_learn(learn_config);
        if (apply->parsed()) return run_apply(apply_config);
        return run_eval(eval_config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

// fdkit command-line tool: synthesize or ingest vibration signals, build
// instruction corpora, plan train/eval splits, run baseline classifiers, and
// evaluate chat-completion endpoints on the resulting eval sets.

#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdkit/baselines.hpp"
#include "fdkit/evalkit.hpp"
#include "fdkit/llm_client.hpp"
#include "fdkit/promptgen.hpp"
#include "fdkit/signal_io.hpp"
#include "fdkit/splits.hpp"
#include "fdkit/synth.hpp"
#include "fdkit/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
    char buf[32];
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// every output directory gets a manifest tying artifacts to their config
void write_run_manifest(const fs::path& dir, const std::string& command, const json& config) {
    fs::create_directories(dir);
    json m;
    m["command"] = command;
    m["config"] = config;
    m["config_hash"] = fdkit::hex64(fdkit::fnv1a64(config.dump()));
    m["version"] = FDKIT_VERSION;
    m["created_utc"] = utc_now();
    std::ofstream out(dir / "run_manifest.json", std::ios::trunc);
    out << m.dump(2) << "\n";
}

fdkit::SensorPosition parse_end(const std::string& s) {
    return fdkit::sensor_position_from_string(s);
}

void ensure_parent_dir(const std::string& file_path) {
    const fs::path parent = fs::path(file_path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

struct SubsetId {
    int load_hp;
    fdkit::SensorPosition pos;
};

SubsetId parse_subset_id(const std::string& id) {
    // "0HPDE", "3HPFE"
    if (id.size() != 5 || id[0] < '0' || id[0] > '3' || id.substr(1, 2) != "HP")
        fdkit::fail("InvalidParameter", "subset id must look like 0HPDE or 3HPFE, got '" + id + "'");
    return {id[0] - '0', parse_end(id.substr(3))};
}

std::vector<fdkit::FaultAnnotation> full_class_set() {
    std::vector<fdkit::FaultAnnotation> anns = {{fdkit::FaultKind::Normal, std::nullopt}};
    for (fdkit::FaultKind kind : {fdkit::FaultKind::InnerRace, fdkit::FaultKind::OuterRace,
                                  fdkit::FaultKind::RollingElement})
        for (double size : fdkit::kFaultSizesInches) anns.push_back({kind, size});
    return anns;
}

// --- synth -------------------------------------------------------------------

struct SynthArgs {
    std::string out;
    std::string fault = "all";
    double size = 0.014;
    int load = 0;
    int rpm = 0;  // 0 = derive from load
    std::string end = "de";
    bool full_grid = false;
    double duration = 2.0;
    double fs = 12000.0;
    double noise = 0.1;
    std::uint64_t seed = 0;
};

json synth_config(const SynthArgs& a) {
    json j;
    j["out"] = a.out;
    j["fault"] = a.fault;
    j["size"] = a.size;
    j["load"] = a.load;
    j["rpm"] = a.rpm;
    j["end"] = a.end;
    j["full_grid"] = a.full_grid;
    j["duration"] = a.duration;
    j["fs"] = a.fs;
    j["noise"] = a.noise;
    j["seed"] = a.seed;
    return j;
}

void run_synth(const SynthArgs& a) {
    std::vector<std::pair<int, fdkit::SensorPosition>> conditions;
    if (a.full_grid) {
        for (int load = 0; load <= 3; ++load)
            for (auto pos : {fdkit::SensorPosition::DriveEnd, fdkit::SensorPosition::FanEnd})
                conditions.emplace_back(load, pos);
    } else {
        conditions.emplace_back(a.load, parse_end(a.end));
    }

    std::size_t written = 0;
    for (const auto& [load, pos] : conditions) {
        std::vector<fdkit::FaultAnnotation> anns;
        if (a.fault == "all") {
            anns = full_class_set();
        } else {
            fdkit::FaultKind kind = fdkit::fault_kind_from_string(a.fault);
            anns.push_back({kind, kind == fdkit::FaultKind::Normal
                                      ? std::optional<double>{}
                                      : std::optional<double>{a.size}});
        }
        for (std::size_t i = 0; i < anns.size(); ++i) {
            fdkit::SynthSpec spec;
            spec.fault = anns[i];
            spec.load_hp = load;
            spec.speed_rpm = a.rpm > 0 ? a.rpm : fdkit::kSpeedRpmForLoad[load];
            spec.duration_s = a.duration;
            spec.sampling_rate_hz = a.fs;
            spec.noise_sigma = a.noise;
            spec.sensor_position = pos;
            spec.seed = fdkit::mix_seed(a.seed, fdkit::subset_id_for(load, pos) + "/" +
                                                    std::to_string(i));
            fdkit::save_signal(a.out, fdkit::generate(spec));
            ++written;
        }
    }
    write_run_manifest(a.out, "synth", synth_config(a));
    std::cout << "wrote " << written << " signal(s) to " << a.out << "\n";
}

// --- ingest ------------------------------------------------------------------

struct IngestArgs {
    std::string input;
    std::string out;
    std::string fault = "normal";
    double size = 0.0;
    int load = 0;
    int rpm = 0;
    std::string channel;  // optional hint: de|fe
    double fs = 12000.0;
};

void run_ingest(const IngestArgs& a) {
    fdkit::FaultAnnotation ann;
    ann.kind = fdkit::fault_kind_from_string(a.fault);
    if (ann.kind != fdkit::FaultKind::Normal) {
        if (a.size <= 0.0)
            fdkit::fail("InvalidParameter", "--size is required for fault recordings");
        ann.size_inches = a.size;
    }
    std::optional<fdkit::SensorPosition> hint;
    if (!a.channel.empty()) hint = parse_end(a.channel);
    const int rpm = a.rpm > 0 ? a.rpm : fdkit::kSpeedRpmForLoad[a.load];
    auto sig = fdkit::load_signal(a.input, hint, ann, {a.load, rpm}, a.fs);
    fdkit::save_signal(a.out, sig);

    json cfg;
    cfg["input"] = a.input;
    cfg["out"] = a.out;
    cfg["fault"] = a.fault;
    cfg["size"] = a.size;
    cfg["load"] = a.load;
    cfg["rpm"] = rpm;
    cfg["channel"] = a.channel;
    cfg["fs"] = a.fs;
    write_run_manifest(a.out, "ingest", cfg);
    std::cout << "ingested " << sig.source_id << " (" << sig.samples.size() << " samples) into "
              << a.out << "\n";
}

// --- build -------------------------------------------------------------------

struct BuildArgs {
    std::string signals;
    std::string out;
    std::string track = "fft";
    std::string scheme = "4";
    std::string subset;  // optional filter like 0HPDE
    int k = 230;
    std::size_t l = fdkit::kDefaultSegmentLength;
    int d = fdkit::kDefaultDecimals;
    std::string mode = "random";
    std::uint64_t seed = 0;
    bool no_equip_info = false;
    bool one_sided = false;
    std::string equip_file;
    std::string format = "jsonl";
};

json build_config(const BuildArgs& a) {
    json j;
    j["signals"] = a.signals;
    j["out"] = a.out;
    j["track"] = a.track;
    j["scheme"] = a.scheme;
    j["subset"] = a.subset;
    j["k"] = a.k;
    j["l"] = a.l;
    j["d"] = a.d;
    j["mode"] = a.mode;
    j["seed"] = a.seed;
    j["no_equip_info"] = a.no_equip_info;
    j["one_sided"] = a.one_sided;
    j["equip_file"] = a.equip_file;
    j["format"] = a.format;
    return j;
}

fdkit::EquipInfo load_equip_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fdkit::fail("IoError", "cannot open equip file " + path);
    json j;
    in >> j;
    fdkit::EquipInfo e;
    e.name = j.at("name").get<std::string>();
    e.model = j.at("model").get<std::string>();
    if (j.contains("geometry"))
        for (const auto& [k, v] : j.at("geometry").items())
            e.geometry.emplace_back(k, v.get<std::string>());
    return e;
}

std::vector<fdkit::TimeSeriesSignal> load_build_signals(const BuildArgs& a) {
    auto signals = fdkit::load_signal_dir(a.signals);
    if (!a.subset.empty()) {
        const SubsetId want = parse_subset_id(a.subset);
        std::erase_if(signals, [&](const fdkit::TimeSeriesSignal& s) {
            return s.load_hp != want.load_hp || s.sensor_position != want.pos;
        });
    }
    if (signals.empty()) fdkit::fail("EmptyInput", "no signals match in " + a.signals);
    return signals;
}

void run_build(const BuildArgs& a) {
    auto signals = load_build_signals(a);
    ensure_parent_dir(a.out);

    fdkit::BuildOptions opts;
    opts.track = fdkit::track_from_string(a.track);
    opts.scheme = fdkit::scheme_from_string(a.scheme);
    opts.k_per_class = a.k;
    opts.segment_length = a.l;
    opts.decimals = a.d;
    opts.mode = a.mode == "contiguous" ? fdkit::SegmentMode::ContiguousNonOverlap
                                       : fdkit::SegmentMode::RandomStart;
    opts.seed = a.seed;
    opts.include_equip_info = !a.no_equip_info;
    opts.one_sided = a.one_sided;
    if (!a.equip_file.empty()) opts.equip = load_equip_file(a.equip_file);

    auto records = fdkit::build_subset(signals, opts);

    if (a.format == "csv") {
        // labeled vectors for the baseline classifiers: label code, then the
        // raw numeric payload (spectrum bins or the 15 features), straight
        // from the signals so the CSV path carries no quantization loss
        std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
        if (!out) fdkit::fail("IoError", "cannot create " + a.out);
        std::vector<std::vector<double>> rows;
        std::vector<std::string> labels;
        for (const auto& sig : signals) {
            const std::uint64_t seg_seed = fdkit::mix_seed(opts.seed, sig.source_id);
            const int quota = opts.k_per_class;
            auto segs = fdkit::segment(sig, opts.segment_length, quota, opts.mode, seg_seed);
            const auto label = fdkit::label_for(sig.fault, opts.scheme);
            for (const auto& seg : segs) {
                if (opts.track == fdkit::Track::FFT) {
                    rows.push_back(fdkit::fft_magnitude(seg).values);
                } else {
                    auto v = fdkit::compute_features(seg, sig.sampling_rate_hz).values();
                    rows.emplace_back(v.begin(), v.end());
                }
                labels.push_back(fdkit::label_code(label));
            }
        }
        out << "label";
        if (opts.track == fdkit::Track::Stat)
            for (const char* name : fdkit::FeatureVector::kNames) out << "," << name;
        else
            for (std::size_t i = 0; i < rows.front().size(); ++i) out << ",f" << i;
        out << "\n";
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out << labels[r];
            for (double v : rows[r]) out << "," << fdkit::format_sig(v, 12);
            out << "\n";
        }
    } else {
        fdkit::write_jsonl(records, a.out);
    }

    // per-corpus manifest so sibling builds in one directory do not clobber it
    json cfg = build_config(a);
    json m;
    m["command"] = "build";
    m["config"] = cfg;
    m["config_hash"] = fdkit::hex64(fdkit::fnv1a64(cfg.dump()));
    m["version"] = FDKIT_VERSION;
    m["created_utc"] = utc_now();
    std::ofstream mf(a.out + ".manifest.json", std::ios::trunc);
    mf << m.dump(2) << "\n";
    std::cout << "wrote " << records.size() << " records to " << a.out << "\n";
}

// --- split -------------------------------------------------------------------

struct SplitArgs {
    std::string corpora;
    std::string plan = "task2";
    std::uint64_t seed = 0;
    std::string out;
};

void run_split(const SplitArgs& a) {
    fdkit::SplitPlan plan;
    if (a.plan == "task1-de") plan = fdkit::task1_plan(fdkit::SensorPosition::DriveEnd, a.seed);
    else if (a.plan == "task1-fe") plan = fdkit::task1_plan(fdkit::SensorPosition::FanEnd, a.seed);
    else if (a.plan == "task2") plan = fdkit::task2_plan(a.seed);
    else if (a.plan == "task3") plan = fdkit::task3_plan(a.seed);
    else fdkit::fail("InvalidParameter", "unknown plan '" + a.plan + "'");

    std::map<std::string, std::vector<fdkit::PromptRecord>> corpora;
    std::vector<std::string> wanted = plan.train_subsets;
    for (const auto& e : plan.eval_sets)
        for (const auto& s : e.subsets) wanted.push_back(s);
    for (const auto& subset : wanted) {
        if (corpora.count(subset)) continue;
        const fs::path path = fs::path(a.corpora) / (subset + ".jsonl");
        if (!fs::exists(path))
            fdkit::fail("MissingSubset", "expected corpus " + path.string());
        corpora[subset] = fdkit::read_jsonl(path.string());
    }

    auto result = fdkit::apply_plan(plan, corpora);

    // conventional merged-dataset alias, e.g. CWRUfft-DE, CWRUst-all, 0HPDE
    std::string alias;
    if (!result.train.empty()) {
        const std::string track = to_string(result.train.front().meta.track);
        const std::string t = track == "stat" ? "st" : track;
        if (a.plan == "task1-de") alias = "CWRU" + t + "-DE";
        else if (a.plan == "task1-fe") alias = "CWRU" + t + "-FE";
        else if (a.plan == "task3") alias = "CWRU" + t + "-all";
        else alias = plan.train_subsets.front();
    }

    fs::create_directories(a.out);
    fdkit::write_jsonl(result.train, (fs::path(a.out) / "train.jsonl").string());
    fdkit::write_manifest((fs::path(a.out) / "train.manifest.txt").string(), plan.name, plan.seed,
                          "train", result.train);
    for (const auto& [name, records] : result.eval_sets) {
        fdkit::write_jsonl(records, (fs::path(a.out) / ("eval_" + name + ".jsonl")).string());
        fdkit::write_manifest((fs::path(a.out) / ("eval_" + name + ".manifest.txt")).string(),
                              plan.name, plan.seed, "eval_" + name, records);
    }

    json cfg;
    cfg["corpora"] = a.corpora;
    cfg["plan"] = a.plan;
    cfg["seed"] = a.seed;
    cfg["out"] = a.out;
    cfg["train_dataset"] = alias;
    write_run_manifest(a.out, "split", cfg);
    std::cout << "plan " << plan.name << " (" << alias << "): train " << result.train.size()
              << " records, " << result.eval_sets.size() << " eval set(s) in " << a.out << "\n";
}

// --- baseline ----------------------------------------------------------------

struct BaselineArgs {
    std::string model = "knn";
    std::size_t k = 5;
    std::string train;
    std::string test;
    std::string out;
};

void load_labeled_csv(const std::string& path, std::vector<std::vector<double>>& xs,
                      std::vector<std::string>& ys) {
    std::ifstream in(path);
    if (!in) fdkit::fail("IoError", "cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("label", 0) != 0)
        fdkit::fail("MalformedLine", path + " must start with a 'label,...' header");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream cells(line);
        std::string cell;
        if (!std::getline(cells, cell, ','))
            fdkit::fail("MalformedLine", path + " line " + std::to_string(lineno));
        ys.push_back(cell);
        std::vector<double> row;
        while (std::getline(cells, cell, ',')) {
            char* end = nullptr;
            row.push_back(std::strtod(cell.c_str(), &end));
            if (end == cell.c_str())
                fdkit::fail("MalformedLine",
                            path + " line " + std::to_string(lineno) + ": bad number '" + cell + "'");
        }
        xs.push_back(std::move(row));
    }
}

void run_baseline(const BaselineArgs& a) {
    std::vector<std::vector<double>> train_x, test_x;
    std::vector<std::string> train_y, test_y;
    load_labeled_csv(a.train, train_x, train_y);
    load_labeled_csv(a.test, test_x, test_y);

    const auto kind = a.model == "centroid" ? fdkit::ClassifierKind::NearestCentroid
                      : a.model == "knn"    ? fdkit::ClassifierKind::Knn
                                            : throw fdkit::Error("InvalidParameter",
                                                                 "--model must be knn or centroid");
    auto model = fdkit::fit(train_x, train_y, kind, a.k);
    auto predictions = fdkit::predict_batch(model, test_x);

    std::size_t hits = 0;
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_label;  // label -> (hits, total)
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        auto& [h, t] = per_label[test_y[i]];
        ++t;
        if (predictions[i] == test_y[i]) {
            ++h;
            ++hits;
        }
    }
    const double accuracy = static_cast<double>(hits) / static_cast<double>(predictions.size());

    json rep;
    rep["model"] = a.model;
    rep["k"] = a.k;
    rep["n_train"] = train_x.size();
    rep["n_test"] = test_x.size();
    rep["accuracy"] = accuracy;
    for (const auto& [label, ht] : per_label)
        rep["per_label"][label] = {{"correct", ht.first}, {"total", ht.second}};

    std::cout << "accuracy " << fdkit::format_sig(accuracy, 6) << " on " << test_x.size()
              << " rows\n";
    if (!a.out.empty()) {
        ensure_parent_dir(a.out);
        std::ofstream out(a.out, std::ios::trunc);
        if (!out) fdkit::fail("IoError", "cannot create " + a.out);
        out << rep.dump(2) << "\n";
    }
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
    std::string endpoint;
    std::string model;
    std::string set;
    std::string scheme;  // empty = take from records
    std::string out = "eval_out";
    int concurrency = 4;
    double timeout = 30.0;
    double temperature = 0.0;
    int max_tokens = 32;
    std::string cache;
    std::string synonyms;
    int max_records = 0;  // 0 = all
};

void run_eval(const EvalArgs& a) {
    // --out may name the report.json itself or a directory to fill
    std::string out_dir = a.out;
    if (out_dir.size() > 5 && out_dir.substr(out_dir.size() - 5) == ".json") {
        const fs::path parent = fs::path(out_dir).parent_path();
        out_dir = parent.empty() ? "." : parent.string();
    }

    auto records = fdkit::read_jsonl(a.set);
    if (records.empty()) fdkit::fail("EmptyInput", "eval set " + a.set + " is empty");
    if (a.max_records > 0 && records.size() > static_cast<std::size_t>(a.max_records))
        records.resize(static_cast<std::size_t>(a.max_records));

    const fdkit::LabelScheme scheme = a.scheme.empty() ? records.front().meta.label.scheme
                                                       : fdkit::scheme_from_string(a.scheme);

    fdkit::InferenceConfig cfg;
    cfg.endpoint_url = a.endpoint;
    cfg.model_name = a.model;
    cfg.temperature = a.temperature;
    cfg.max_tokens = a.max_tokens;
    cfg.max_concurrency = a.concurrency;
    cfg.timeout_s = a.timeout;
    cfg.cache_dir = a.cache;

    const auto synonyms =
        a.synonyms.empty() ? fdkit::default_synonyms() : fdkit::load_synonyms(a.synonyms);
    auto eval = fdkit::evaluate_endpoint(cfg, records, scheme, out_dir, synonyms);

    json cfgj;
    cfgj["endpoint"] = a.endpoint;
    cfgj["model"] = a.model;
    cfgj["set"] = a.set;
    cfgj["scheme"] = to_string(scheme);
    cfgj["concurrency"] = a.concurrency;
    cfgj["temperature"] = a.temperature;
    cfgj["max_tokens"] = a.max_tokens;
    cfgj["records"] = records.size();
    write_run_manifest(out_dir, "eval", cfgj);

    std::cout << fdkit::render_report_table(eval.scored);
    std::cout << "report written to " << (fs::path(out_dir) / "report.json").string() << "\n";
}

// --- report ------------------------------------------------------------------

struct ReportArgs {
    std::string in;
    std::string confusion;
};

void run_report(const ReportArgs& a) {
    std::ifstream in(a.in);
    if (!in) fdkit::fail("IoError", "cannot open " + a.in);
    json j;
    in >> j;

    std::printf("accuracy %.4f | macro P %.4f R %.4f F1 %.4f | unmapped %llu/%llu\n",
                j.at("accuracy").get<double>(), j.at("macro_precision").get<double>(),
                j.at("macro_recall").get<double>(), j.at("macro_f1").get<double>(),
                static_cast<unsigned long long>(j.at("unmapped_count").get<std::uint64_t>()),
                static_cast<unsigned long long>(j.at("total").get<std::uint64_t>()));
    std::printf("%-10s %9s %8s %8s %8s\n", "class", "precision", "recall", "f1", "support");
    for (const auto& pc : j.at("per_class")) {
        std::printf("%-10s %9.4f %8.4f %8.4f %8llu\n", pc.at("label").get<std::string>().c_str(),
                    pc.at("precision").get<double>(), pc.at("recall").get<double>(),
                    pc.at("f1").get<double>(),
                    static_cast<unsigned long long>(pc.at("support").get<std::uint64_t>()));
    }

    if (!a.confusion.empty()) {
        ensure_parent_dir(a.confusion);
        fdkit::ConfusionMatrix cm;
        for (const auto& l : j.at("confusion").at("labels")) cm.labels.push_back(l.get<std::string>());
        for (const auto& row : j.at("confusion").at("rows"))
            cm.counts.push_back(row.get<std::vector<std::uint64_t>>());
        std::ofstream out(a.confusion, std::ios::trunc);
        if (!out) fdkit::fail("IoError", "cannot create " + a.confusion);
        out << fdkit::confusion_to_csv(cm);
    }
}

// --- encode (debug) ----------------------------------------------------------

struct EncodeArgs {
    std::string in;
    std::size_t l = fdkit::kDefaultSegmentLength;
    int d = fdkit::kDefaultDecimals;
    bool one_sided = false;
};

void run_encode(const EncodeArgs& a) {
    std::vector<double> samples;
    if (!a.in.empty()) {
        auto bytes = fdkit::read_file_bytes(a.in);
        samples = a.in.size() > 4 && a.in.substr(a.in.size() - 4) == ".txt"
                      ? fdkit::parse_text_samples(bytes)
                      : fdkit::parse_f64_stream(bytes);
    } else {
        double v;
        while (std::cin >> v) samples.push_back(v);
    }
    if (samples.size() < a.l)
        fdkit::fail("SignalTooShort", "need at least " + std::to_string(a.l) + " samples, got " +
                                          std::to_string(samples.size()));
    fdkit::Segment seg;
    seg.samples.assign(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(a.l));
    seg.parent = a.in.empty() ? "stdin" : a.in;
    fdkit::EncodeOptions opts;
    opts.decimals = a.d;
    opts.one_sided = a.one_sided;
    std::cout << fdkit::encode(fdkit::fft_magnitude(seg), opts).text << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vibration fault-diagnosis corpus toolkit"};
    app.set_version_flag("--version", FDKIT_VERSION);
    app.set_config("--config", "", "TOML config file; CLI flags override file values");
    app.require_subcommand(1);

    std::string workdir;
    app.add_option("--workdir", workdir, "run with all relative paths anchored here");

    SynthArgs synth;
    auto* cmd_synth = app.add_subcommand("synth", "generate labeled synthetic bearing signals");
    cmd_synth->add_option("--out", synth.out, "signal store directory")->required();
    cmd_synth->add_option("--fault", synth.fault, "all|normal|inner|outer|ball");
    cmd_synth->add_option("--size", synth.size, "fault size in inches");
    cmd_synth->add_option("--load", synth.load, "motor load, hp")->check(CLI::Range(0, 3));
    cmd_synth->add_option("--rpm", synth.rpm, "shaft speed (default: per load)");
    cmd_synth->add_option("--end", synth.end, "de|fe sensor position");
    cmd_synth->add_flag("--full-grid", synth.full_grid, "all 8 (load, end) conditions");
    cmd_synth->add_option("--duration", synth.duration, "seconds per signal");
    cmd_synth->add_option("--fs", synth.fs, "sampling rate, Hz");
    cmd_synth->add_option("--noise", synth.noise, "Gaussian noise sigma");
    cmd_synth->add_option("--seed", synth.seed, "master seed");

    IngestArgs ingest;
    auto* cmd_ingest = app.add_subcommand("ingest", "parse a recording into the signal store");
    cmd_ingest->add_option("--input", ingest.input, "MAT-v5 / .f64 / .txt file")->required();
    cmd_ingest->add_option("--out", ingest.out, "signal store directory")->required();
    cmd_ingest->add_option("--fault", ingest.fault, "normal|inner|outer|ball");
    cmd_ingest->add_option("--size", ingest.size, "fault size in inches");
    cmd_ingest->add_option("--load", ingest.load, "motor load, hp")->check(CLI::Range(0, 3));
    cmd_ingest->add_option("--rpm", ingest.rpm, "shaft speed (default: per load)");
    cmd_ingest->add_option("--channel", ingest.channel, "de|fe channel hint for MAT files");
    cmd_ingest->add_option("--fs", ingest.fs, "sampling rate, Hz");

    BuildArgs build;
    auto* cmd_build = app.add_subcommand("build", "build a prompt corpus from stored signals");
    cmd_build->add_option("--signals", build.signals, "signal store directory")->required();
    cmd_build->add_option("--out", build.out, "output corpus file")->required();
    cmd_build->add_option("--track", build.track, "fft|stat");
    cmd_build->add_option("--scheme", build.scheme, "4|10 label scheme");
    cmd_build->add_option("--subset", build.subset, "restrict to one condition, e.g. 0HPDE");
    cmd_build->add_option("--k", build.k, "segments per class and size");
    cmd_build->add_option("--l", build.l, "segment length");
    cmd_build->add_option("--d", build.d, "decimals kept by quantization");
    cmd_build->add_option("--mode", build.mode, "random|contiguous segmentation");
    cmd_build->add_option("--seed", build.seed, "master seed");
    cmd_build->add_flag("--no-equip-info", build.no_equip_info,
                        "omit machine information from instructions");
    cmd_build->add_flag("--one-sided", build.one_sided, "encode only bins 0..L/2");
    cmd_build->add_option("--equip-file", build.equip_file, "JSON machine description");
    cmd_build->add_option("--format", build.format, "jsonl|csv output format");

    SplitArgs split;
    auto* cmd_split = app.add_subcommand("split", "apply a task split plan to built corpora");
    cmd_split->add_option("--corpora", split.corpora, "directory of <subset>.jsonl files")
        ->required();
    cmd_split->add_option("--plan", split.plan, "task1-de|task1-fe|task2|task3");
    cmd_split->add_option("--seed", split.seed, "split seed");
    cmd_split->add_option("--out", split.out, "output directory")->required();

    BaselineArgs baseline;
    auto* cmd_baseline = app.add_subcommand("baseline", "run a desk-scale oracle classifier");
    cmd_baseline->add_option("--model", baseline.model, "knn|centroid");
    cmd_baseline->add_option("--k", baseline.k, "neighbors for knn");
    cmd_baseline->add_option("--train", baseline.train, "labeled training CSV")->required();
    cmd_baseline->add_option("--test", baseline.test, "labeled test CSV")->required();
    cmd_baseline->add_option("--out", baseline.out, "write a JSON report here");

    EvalArgs eval;
    auto* cmd_eval = app.add_subcommand("eval", "evaluate a chat-completion endpoint");
    cmd_eval->add_option("--endpoint", eval.endpoint, "base URL, e.g. http://127.0.0.1:8000")
        ->required();
    cmd_eval->add_option("--model", eval.model, "served model name")->required();
    cmd_eval->add_option("--set", eval.set, "eval set JSONL")->required();
    cmd_eval->add_option("--scheme", eval.scheme, "4|10 (default: from the records)");
    cmd_eval->add_option("--out", eval.out, "output directory");
    cmd_eval->add_option("--concurrency", eval.concurrency, "max in-flight requests");
    cmd_eval->add_option("--timeout", eval.timeout, "per-request timeout, seconds");
    cmd_eval->add_option("--temperature", eval.temperature, "decoding temperature");
    cmd_eval->add_option("--max-tokens", eval.max_tokens, "completion token cap");
    cmd_eval->add_option("--cache", eval.cache, "response cache directory");
    cmd_eval->add_option("--synonyms", eval.synonyms, "label synonym table JSON");
    cmd_eval->add_option("--max-records", eval.max_records, "evaluate only the first N records");

    ReportArgs report;
    auto* cmd_report = app.add_subcommand("report", "render a report.json");
    cmd_report->add_option("--in", report.in, "report.json path")->required();
    cmd_report->add_option("--confusion", report.confusion, "also write the confusion CSV here");

    EncodeArgs encode;
    auto* cmd_encode = app.add_subcommand("encode", "debug: encode a float stream");
    cmd_encode->add_option("--in", encode.in, ".f64 or .txt input (default: stdin decimals)");
    cmd_encode->add_option("--l", encode.l, "segment length");
    cmd_encode->add_option("--d", encode.d, "decimals");
    cmd_encode->add_flag("--one-sided", encode.one_sided, "encode only bins 0..L/2");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!workdir.empty()) fs::current_path(workdir);
        if (cmd_synth->parsed()) run_synth(synth);
        else if (cmd_ingest->parsed()) run_ingest(ingest);
        else if (cmd_build->parsed()) run_build(build);
        else if (cmd_split->parsed()) run_split(split);
        else if (cmd_baseline->parsed()) run_baseline(baseline);
        else if (cmd_eval->parsed()) run_eval(eval);
        else if (cmd_report->parsed()) run_report(report);
        else if (cmd_encode->parsed()) run_encode(encode);
    } catch (const fdkit::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: Internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

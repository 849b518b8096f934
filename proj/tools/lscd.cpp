// lscd: command-line driver for the semantic change pipeline.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "lscd/lscd.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

std::string manifest_path(const std::string& out) { return out + ".manifest.json"; }

void write_table(const std::string& path, const lscd::ChangeScoreTable& t, lscd::RunManifest& manifest,
                 const std::string& stage) {
  auto out = open_out(path);
  lscd::write_scores_tsv(out, t);
  for (const auto& [lemma, why] : t.missing_reasons) manifest.warn(stage, "dropped '" + lemma + "': " + why);
  manifest.record("scored", t.present().size());
  manifest.record("missing", t.missing().size());
}

lscd::ChangeScoreTable load_table(const std::string& path, lscd::RunManifest& manifest) {
  manifest.add_input(path);
  auto in = open_in(path);
  return lscd::read_scores_tsv(in, fs::path(path).stem().string());
}

// --- profile ---------------------------------------------------------------

struct ProfileArgs {
  std::vector<std::string> corpus_t1, corpus_t2;
  std::string targets, kind = "morphsynt", out, profile_dir, language;
  bool case_fold = false, strict = false;
  std::uint64_t min_frequency = 0;
};

void run_profile(const ProfileArgs& a) {
  lscd::RunManifest manifest("profile");
  manifest.set_config({{"kind", a.kind}, {"case_fold", a.case_fold}, {"strict", a.strict},
                       {"min_frequency", a.min_frequency}, {"language", a.language}});
  manifest.add_input(a.targets);
  auto tin = open_in(a.targets);
  auto entries = lscd::read_targets_tsv(tin);
  lscd::TargetLexicon lexicon(entries, a.language, a.case_fold);

  const auto mode = a.strict ? lscd::ParseMode::Strict : lscd::ParseMode::Lenient;
  auto ingest = [&](const std::vector<std::string>& files, lscd::Period period) {
    lscd::ProfileAccumulator acc(lexicon, period);
    for (const auto& f : files) {
      manifest.add_input(f);
      auto in = open_in(f);
      lscd::ConlluReader reader(in, mode);
      while (auto s = reader.next()) acc.add(*s);
      const auto& st = reader.stats();
      spdlog::info("{}: {} sentences, {} tokens", f, st.sentences, st.tokens);
      for (auto line : st.malformed_lines) manifest.warn("corpus", f + ": skipped malformed line " + std::to_string(line));
    }
    return acc;
  };
  auto acc1 = ingest(a.corpus_t1, lscd::Period::T1);
  auto acc2 = ingest(a.corpus_t2, lscd::Period::T2);

  lscd::ProfileKind kind = a.kind == "morph" ? lscd::ProfileKind::Morph
                           : a.kind == "synt" ? lscd::ProfileKind::Synt
                                              : lscd::ProfileKind::MorphSynt;
  const std::string dump_dir = a.profile_dir.empty() ? a.out + ".profiles" : a.profile_dir;
  fs::create_directories(dump_dir);
  lscd::ChangeScoreTable table;
  table.method_id = std::string(lscd::to_string(kind));
  for (const auto& e : lexicon.entries()) {
    auto p1 = acc1.profile(e.lemma);
    auto p2 = acc2.profile(e.lemma);
    for (const auto* p : {&p1, &p2}) {
      if (p->n_usages == 0)
        manifest.warn("profiling", "'" + e.lemma + "' has no usages in " + std::string(lscd::to_string(p->period)));
      auto out = open_out((fs::path(dump_dir) / (e.lemma + "." + std::string(lscd::to_string(p->period)) + ".json")).string());
      out << lscd::to_json(*p).dump(2) << '\n';
    }
    table.set(e.lemma, lscd::score_profiles(p1, p2, kind, {a.min_frequency}));
  }
  write_table(a.out, table, manifest, "profiling");
  manifest.write(manifest_path(a.out));
}

// --- embed-score -----------------------------------------------------------

struct EmbedArgs {
  std::string umx_t1, umx_t2, metric = "prt", out, targets;
  std::uint64_t seed = 0;
  std::size_t max_usages = 0;
  unsigned threads = 1;
};

std::set<std::string> umx_lemmas(const std::string& dir) {
  std::set<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".umx") out.insert(entry.path().stem().string());
  return out;
}

void run_embed(const EmbedArgs& a) {
  lscd::RunManifest manifest("embed-score");
  manifest.set_seed(a.seed);
  manifest.set_config({{"metric", a.metric}, {"max_usages", a.max_usages}, {"threads", a.threads}});

  std::set<std::string> lemmas;
  if (!a.targets.empty()) {
    manifest.add_input(a.targets);
    auto in = open_in(a.targets);
    for (const auto& e : lscd::read_targets_tsv(in)) lemmas.insert(e.lemma);
  } else {
    lemmas = umx_lemmas(a.umx_t1);
    for (const auto& l : umx_lemmas(a.umx_t2)) lemmas.insert(l);
  }

  auto load = [&](const std::string& dir, const std::string& lemma, lscd::Period period,
                  std::uint64_t stream) -> std::optional<lscd::UsageMatrix> {
    auto path = (fs::path(dir) / (lemma + ".umx")).string();
    if (!fs::exists(path)) return std::nullopt;
    manifest.add_input(path);
    auto in = open_in(path, true);
    auto m = lscd::read_usage_matrix(in);
    m.lemma = lemma;
    m.period = period;
    if (a.max_usages > 0 && m.rows() > a.max_usages) {
      manifest.warn("contextual", "'" + lemma + "' " + std::string(lscd::to_string(period)) + ": subsampled " +
                                      std::to_string(m.rows()) + " usages to " + std::to_string(a.max_usages));
      m = lscd::subsample(m, a.max_usages, a.seed ^ (stream * 0x9E3779B97F4A7C15ULL));
    }
    return m;
  };

  lscd::ChangeScoreTable table;
  table.method_id = a.metric == "apd" ? "APD" : a.metric == "prt" ? "PRT" : a.metric == "apd-prt" ? "APD-PRT" : "JSD";
  nlohmann::json clusters = nlohmann::json::object();
  std::uint64_t stream = 0;
  for (const auto& lemma : lemmas) {
    auto u1 = load(a.umx_t1, lemma, lscd::Period::T1, ++stream);
    auto u2 = load(a.umx_t2, lemma, lscd::Period::T2, ++stream);
    if (!u1 || !u2) {
      table.set(lemma, lscd::MaybeScore::missing(std::string("no usage matrix for ") + (u1 ? "T2" : "T1")));
      continue;
    }
    try {
      if (a.metric == "apd") {
        table.set(lemma, lscd::apd(*u1, *u2, a.threads));
      } else if (a.metric == "prt") {
        table.set(lemma, lscd::prt(*u1, *u2));
      } else if (a.metric == "apd-prt") {
        table.set(lemma, lscd::apd_prt(*u1, *u2, a.threads));
      } else {
        lscd::AffinityPropagationOptions opts;
        opts.threads = a.threads;
        auto r = lscd::jsd_score(*u1, *u2, opts);
        if (!r.converged) manifest.warn("contextual", "'" + lemma + "': " + r.score.reason);
        clusters[lemma] = {{"n_clusters", r.n_clusters}, {"converged", r.converged}};
        table.set(lemma, r.score);
      }
    } catch (const lscd::ContractError& e) {
      table.set(lemma, lscd::MaybeScore::missing(e.what()));
    }
  }
  if (!clusters.empty()) manifest.record("clusters", clusters);
  write_table(a.out, table, manifest, "contextual");
  manifest.write(manifest_path(a.out));
}

// --- static-score ----------------------------------------------------------

struct StaticArgs {
  std::string vec_t1, vec_t2, targets, mode = "raw", out, dump_q;
};

void run_static(const StaticArgs& a) {
  lscd::RunManifest manifest("static-score");
  manifest.set_config({{"mode", a.mode}});
  for (const auto& p : {a.vec_t1, a.vec_t2, a.targets}) manifest.add_input(p);
  auto in1 = open_in(a.vec_t1);
  auto in2 = open_in(a.vec_t2);
  auto x = lscd::read_word2vec_text(in1);
  auto y = lscd::read_word2vec_text(in2);
  std::vector<std::string> warnings;
  auto al = lscd::procrustes_align(x, y, &warnings);
  manifest.warn_all("static", warnings);
  manifest.record("shared_vocabulary", al.shared.size());
  if (!a.dump_q.empty()) {
    auto out = open_out(a.dump_q);
    lscd::write_usage_matrix(out, lscd::alignment_as_usage_matrix(al.q));
  }
  const auto mode = a.mode == "lemma" ? lscd::AlignmentMode::Lemma : lscd::AlignmentMode::Raw;
  auto tin = open_in(a.targets);
  lscd::ChangeScoreTable table;
  table.method_id = "SGNS-" + std::string(lscd::to_string(mode));
  for (const auto& e : lscd::read_targets_tsv(tin)) table.set(e.lemma, lscd::static_change_score(al, e.lemma, mode));
  write_table(a.out, table, manifest, "static");
  manifest.write(manifest_path(a.out));
}

// --- ensemble / classify / evaluate / correlate ----------------------------

void run_ensemble(const std::vector<std::string>& in, const std::string& out) {
  lscd::RunManifest manifest("ensemble");
  auto a = load_table(in[0], manifest);
  auto b = load_table(in[1], manifest);
  auto t = lscd::ensemble(a, b);
  write_table(out, t, manifest, "scoring");
  manifest.write(manifest_path(out));
}

void run_classify(const std::string& in, const std::string& out) {
  lscd::RunManifest manifest("classify");
  auto t = load_table(in, manifest);
  for (const auto& l : t.missing()) manifest.warn("binarize", "'" + l + "' has no score and is not labelled");
  auto labels = lscd::binarize(t);
  manifest.record("change_point_n", labels.change_point_n);
  auto o = open_out(out);
  lscd::write_labels_tsv(o, labels);
  manifest.write(manifest_path(out));
}

struct EvaluateArgs {
  std::vector<std::string> pred;
  std::string gold, task = "rank", out, tsv, dataset = "dataset";
};

void run_evaluate(const EvaluateArgs& a) {
  lscd::RunManifest manifest("evaluate");
  manifest.set_config({{"task", a.task}, {"dataset", a.dataset}});
  manifest.add_input(a.gold);
  auto gin = open_in(a.gold);
  auto gold = lscd::read_gold_tsv(gin);
  nlohmann::json reports = nlohmann::json::array();
  std::vector<lscd::EvaluationReport> rs;
  for (const auto& p : a.pred) {
    manifest.add_input(p);
    auto in = open_in(p);
    lscd::EvaluationReport r;
    if (a.task == "rank") {
      r = lscd::evaluate_ranking(lscd::read_scores_tsv(in, fs::path(p).stem().string()), gold);
      if (!r.spearman) manifest.warn("evaluation", r.method_id + ": Spearman undefined (no rank variance)");
    } else {
      auto labels = lscd::read_labels_tsv(in);
      if (labels.method_id.empty()) labels.method_id = fs::path(p).stem().string();
      r = lscd::evaluate_classification(labels, gold);
    }
    reports.push_back(lscd::to_json(r));
    rs.push_back(std::move(r));
  }
  auto out = open_out(a.out);
  out << nlohmann::json{{"task", a.task}, {"dataset", a.dataset}, {"reports", reports}}.dump(2) << '\n';
  if (!a.tsv.empty()) {
    auto t = open_out(a.tsv);
    t << "method\t" << a.dataset << '\n';
    for (const auto& r : rs) {
      auto v = a.task == "rank" ? r.spearman : r.accuracy;
      t << r.method_id << '\t' << (v ? lscd::format_double(*v) : "NA") << '\n';
    }
  }
  manifest.write(manifest_path(a.out));
}

void run_correlate(const std::vector<std::string>& in, const std::string& out, const std::string& wide) {
  lscd::RunManifest manifest("correlate");
  std::vector<lscd::ChangeScoreTable> tables;
  for (const auto& p : in) tables.push_back(load_table(p, manifest));
  auto m = lscd::method_correlation_matrix(tables);
  for (std::size_t i = 0; i < m.methods.size(); ++i)
    for (std::size_t j = i + 1; j < m.methods.size(); ++j)
      if (!m.rho[i][j]) manifest.warn("evaluation", m.methods[i] + " vs " + m.methods[j] + ": correlation undefined");
  auto o = open_out(out);
  lscd::write_correlation_tsv(o, m);
  if (!wide.empty()) {
    auto w = open_out(wide);
    lscd::write_wide_tsv(w, tables);
  }
  manifest.write(manifest_path(out));
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("lscd");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("LSCD_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(lvl));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Lexical semantic change detection: grammatical profiles, embedding metrics, ensembling, evaluation.\n"
               "Set LSCD_LOG_LEVEL (trace|debug|info|warn|error|off) for log verbosity."};
  app.set_version_flag("--version", std::string(lscd::kVersion));
  app.require_subcommand(1);

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "Score targets by grammatical profile distance");
  profile->add_option("--corpus-t1", pa.corpus_t1, "CoNLL-U files for period T1")->required()->check(CLI::ExistingFile);
  profile->add_option("--corpus-t2", pa.corpus_t2, "CoNLL-U files for period T2")->required()->check(CLI::ExistingFile);
  profile->add_option("--targets", pa.targets, "Target TSV: lemma[<TAB>pos]")->required()->check(CLI::ExistingFile);
  profile->add_option("--kind", pa.kind, "Profile kind")->check(CLI::IsMember({"morph", "synt", "morphsynt"}));
  profile->add_option("--out", pa.out, "Output scores TSV")->required();
  profile->add_option("--profile-dir", pa.profile_dir, "Profile JSON dump directory (default: <out>.profiles)");
  profile->add_option("--language", pa.language, "Language code recorded in the manifest");
  profile->add_option("--min-frequency", pa.min_frequency, "Drop categories with fewer combined counts");
  profile->add_flag("--case-fold", pa.case_fold, "Case-insensitive lemma matching");
  profile->add_flag("--strict", pa.strict, "Abort on the first malformed CoNLL-U line");

  EmbedArgs ea;
  auto* embed = app.add_subcommand("embed-score", "Score targets from contextualised usage matrices (UMX1)");
  embed->add_option("--umx-t1", ea.umx_t1, "Directory of <lemma>.umx for T1")->required()->check(CLI::ExistingDirectory);
  embed->add_option("--umx-t2", ea.umx_t2, "Directory of <lemma>.umx for T2")->required()->check(CLI::ExistingDirectory);
  embed->add_option("--metric", ea.metric, "Change metric")->check(CLI::IsMember({"apd", "prt", "apd-prt", "jsd"}));
  embed->add_option("--out", ea.out, "Output scores TSV")->required();
  embed->add_option("--targets", ea.targets, "Restrict to these targets")->check(CLI::ExistingFile);
  embed->add_option("--seed", ea.seed, "Seed for usage subsampling");
  embed->add_option("--max-usages", ea.max_usages, "Cap usages per period (0 = no cap)");
  embed->add_option("--threads", ea.threads, "Worker threads")->check(CLI::PositiveNumber);

  StaticArgs sa;
  auto* stat = app.add_subcommand("static-score", "Align static spaces with Orthogonal Procrustes and score targets");
  stat->add_option("--vec-t1", sa.vec_t1, "word2vec text vectors for T1")->required()->check(CLI::ExistingFile);
  stat->add_option("--vec-t2", sa.vec_t2, "word2vec text vectors for T2")->required()->check(CLI::ExistingFile);
  stat->add_option("--targets", sa.targets, "Target TSV")->required()->check(CLI::ExistingFile);
  stat->add_option("--mode", sa.mode, "Vector files built from raw or lemmatised corpora")
      ->check(CLI::IsMember({"raw", "lemma"}));
  stat->add_option("--out", sa.out, "Output scores TSV")->required();
  stat->add_option("--dump-q", sa.dump_q, "Write the alignment matrix as UMX1");

  std::vector<std::string> ens_in;
  std::string ens_out;
  auto* ens = app.add_subcommand("ensemble", "Geometric-mean ensemble of two score tables");
  ens->add_option("--in", ens_in, "Two score TSVs")->required()->expected(2)->check(CLI::ExistingFile);
  ens->add_option("--out", ens_out, "Output scores TSV")->required();

  std::string cls_in, cls_out;
  auto* cls = app.add_subcommand("classify", "Binarize a score table by change point detection");
  cls->add_option("--in", cls_in, "Score TSV")->required()->check(CLI::ExistingFile);
  cls->add_option("--out", cls_out, "Output labels TSV")->required();

  EvaluateArgs va;
  auto* eval = app.add_subcommand("evaluate", "Evaluate predictions against gold annotations");
  eval->add_option("--pred", va.pred, "Score TSVs (rank) or label TSVs (class)")->required()->check(CLI::ExistingFile);
  eval->add_option("--gold", va.gold, "Gold TSV: lemma<TAB>graded[<TAB>binary]")->required()->check(CLI::ExistingFile);
  eval->add_option("--task", va.task, "rank (Spearman) or class (accuracy)")->check(CLI::IsMember({"rank", "class"}));
  eval->add_option("--out", va.out, "Output JSON report")->required();
  eval->add_option("--tsv", va.tsv, "Also write a methods x dataset TSV");
  eval->add_option("--dataset", va.dataset, "Dataset column name for the TSV");

  std::vector<std::string> cor_in;
  std::string cor_out, cor_wide;
  auto* cor = app.add_subcommand("correlate", "Spearman correlations between methods");
  cor->add_option("--in", cor_in, "Score TSVs")->required()->check(CLI::ExistingFile);
  cor->add_option("--out", cor_out, "Output matrix TSV")->required();
  cor->add_option("--wide", cor_wide, "Also write a wide lemma x method score table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }
  if (cor->parsed() && cor_in.size() < 2) {
    std::cerr << "correlate: --in needs at least 2 tables\n";
    return kUsageError;
  }

  try {
    if (profile->parsed()) run_profile(pa);
    else if (embed->parsed()) run_embed(ea);
    else if (stat->parsed()) run_static(sa);
    else if (ens->parsed()) run_ensemble(ens_in, ens_out);
    else if (cls->parsed()) run_classify(cls_in, cls_out);
    else if (eval->parsed()) run_evaluate(va);
    else if (cor->parsed()) run_correlate(cor_in, cor_out, cor_wide);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kRuntimeError;
  }
  return 0;
}

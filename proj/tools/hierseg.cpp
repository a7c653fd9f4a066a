#include "hierseg/error.hpp"
#include "hierseg/evaluation.hpp"
#include "hierseg/io.hpp"
#include "hierseg/pipeline.hpp"
#include "hierseg/synth.hpp"
#include "hierseg/tuning.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace hierseg;

namespace {

// Bad flag combinations detected after parsing; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SelectionFlags {
  std::string mode = "mp";
  double alpha = 6.0;
  double lambda = 10.0;
  int k = 0;
  bool gray = false;
  bool noBoundaryPost = false;
  bool noGreedyBoundary = false;
  std::string testCount = "linear";
  double boundaryEps = 1.0;
  int maxOrder = 0;
  bool presmooth = false;
};

void addSelectionFlags(CLI::App* cmd, SelectionFlags& f, bool withMode) {
  if (withMode)
    cmd->add_option("--mode", f.mode, "Selection algorithm")
        ->check(CLI::IsMember({"mp", "greedy", "mp-fixed-k"}))
        ->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "Scale parameter alpha")->capture_default_str();
  cmd->add_option("--lambda", f.lambda, "Pruning scale of the initial hierarchy")->capture_default_str();
  if (withMode) cmd->add_option("--k", f.k, "Number of regions for mp-fixed-k")->check(CLI::PositiveNumber);
  cmd->add_flag("--gray", f.gray, "Use only the CIELab L channel");
  cmd->add_flag("--no-boundary-post", f.noBoundaryPost, "Skip the boundary merge pass after MP");
  cmd->add_flag("--no-greedy-boundary", f.noGreedyBoundary, "GREEDY without the boundary factor");
  cmd->add_option("--test-count", f.testCount, "Number-of-tests model")
      ->check(CLI::IsMember({"linear", "triangular"}))
      ->capture_default_str();
  cmd->add_option("--boundary-eps", f.boundaryEps, "NFA threshold of the boundary pass")->capture_default_str();
  cmd->add_option("--max-order", f.maxOrder, "Truncate NFA tables at this order (0: no cap)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--presmooth", f.presmooth, "Gaussian pre-smoothing before the gradient");
}

SegmentOptions toOptions(const SelectionFlags& f) {
  SegmentOptions o;
  if (f.mode == "greedy")
    o.mode = SelectionMode::Greedy;
  else if (f.mode == "mp-fixed-k")
    o.mode = SelectionMode::MultipartitionFixedK;
  if (o.mode == SelectionMode::MultipartitionFixedK && f.k <= 0) throw UsageError("--mode mp-fixed-k requires --k");
  if (f.k > 0) o.k = f.k;
  if (f.lambda < 0.0) throw UsageError("--lambda must be non-negative");
  if (f.boundaryEps <= 0.0) throw UsageError("--boundary-eps must be positive");
  o.alpha = f.alpha;
  o.lambda = f.lambda;
  o.gray = f.gray;
  o.boundaryPost = !f.noBoundaryPost;
  o.greedyBoundary = !f.noGreedyBoundary;
  o.testCountMode = f.testCount == "triangular" ? TestCountMode::Triangular : TestCountMode::Linear;
  o.boundaryEps = f.boundaryEps;
  o.maxOrder = f.maxOrder;
  o.presmooth = f.presmooth;
  return o;
}

std::vector<double> parseGrid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 3) throw UsageError("grid must be a0:a1:steps, got '" + spec + "'");
  double lo = 0.0, hi = 0.0;
  int steps = 0;
  try {
    std::size_t used = 0;
    lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("trailing");
    hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("trailing");
    steps = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("grid must be a0:a1:steps, got '" + spec + "'");
  }
  if (!(lo > 0.0) || !(hi >= lo) || steps < 1 || (steps > 1 && hi == lo))
    throw UsageError("grid needs 0 < a0 < a1 and steps >= 1, got '" + spec + "'");
  return logSpacedGrid(lo, hi, steps);
}

std::string defaultPrefix(const std::string& path) { return fs::path(path).stem().string(); }

// Creates the directory part of an output prefix and returns the prefix.
std::string outputPrefix(const std::string& prefix) {
  const auto parent = fs::path(prefix).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  return prefix;
}

void writeCsv(const std::string& path, const std::string& contents) {
  writeFileAtomic(outputPrefix(path), contents);
}

std::ostringstream csvStream() {
  std::ostringstream os;
  os << std::setprecision(12);
  return os;
}

void saveLabels(const LabelMap& labels, const std::string& prefix) {
  if (regionCount(labels) > 65536) {
    saveLabelCsv(labels, prefix + ".csv");
  } else {
    LabelMap compact = labels;
    compactLabels(compact);
    saveLabelPng16(compact, prefix + ".png");
  }
}

std::string regionsCsv(const Image& working, const LabelMap& labels) {
  std::int32_t maxLabel = 0;
  for (auto l : labels.labels) maxLabel = std::max(maxLabel, l);
  const int d = working.channels();
  std::vector<std::int64_t> area(maxLabel + 1, 0);
  std::vector<std::array<double, 3>> sum(maxLabel + 1, {0, 0, 0});
  std::vector<double> sq(maxLabel + 1, 0.0);
  for (std::size_t p = 0; p < working.pixelCount(); ++p) {
    const auto l = labels.labels[p];
    const auto px = working.pixel(p);
    ++area[l];
    for (int c = 0; c < d; ++c) {
      sum[l][c] += px[c];
      sq[l] += px[c] * px[c];
    }
  }
  auto os = csvStream();
  os << "id,area";
  for (int c = 0; c < d; ++c) os << ",mean" << c;
  os << ",msError\n";
  for (std::int32_t l = 0; l <= maxLabel; ++l) {
    if (area[l] == 0) continue;
    double norm = 0.0;
    os << l << ',' << area[l];
    for (int c = 0; c < d; ++c) {
      os << ',' << sum[l][c] / area[l];
      norm += sum[l][c] * sum[l][c];
    }
    os << ',' << std::max(0.0, sq[l] - norm / area[l]) << '\n';
  }
  return os.str();
}

std::string nfaCsv(const std::vector<RankedOrder>& rows) {
  auto os = csvStream();
  os << "k,logTestCount,logProb,lnfa\n";
  for (const auto& r : rows) os << r.k << ',' << r.logTestCount << ',' << r.logProb << ',' << r.lnfa << '\n';
  return os.str();
}

// ---- segment -------------------------------------------------------------

struct SegmentArgs {
  std::string image;
  std::string out;
  int topM = 0;
  std::string errorHist;
  SelectionFlags sel;
};

int cmdSegment(const SegmentArgs& a) {
  const SegmentOptions opt = toOptions(a.sel);
  const std::string prefix = outputPrefix(a.out.empty() ? defaultPrefix(a.image) : a.out);
  const Image source = loadImage(a.image);
  const PreparedImage prepared = prepareImage(source, opt);
  const Partition p = selectPartition(prepared, opt);
  LabelMap labels = p.labels;
  compactLabels(labels);

  saveLabels(labels, prefix + ".labels");
  writeCsv(prefix + ".regions.csv", regionsCsv(prepared.working, labels));
  savePng8(renderMeanColor(source, labels), prefix + ".vis.png");
  const auto pixels = static_cast<std::int64_t>(source.pixelCount());
  if (opt.mode != SelectionMode::Greedy) {
    writeCsv(prefix + ".nfa.csv", nfaCsv(rootLnfaCurve(prepared.tables, opt.testCount(), pixels)));
    if (a.topM > 0) {
      const auto ranked = rankPartitions(prepared.tables, opt.testCount(), pixels, a.topM);
      auto os = csvStream();
      os << "rank,k,logTestCount,logProb,lnfa\n";
      for (std::size_t r = 0; r < ranked.size(); ++r) {
        os << r + 1 << ',' << ranked[r].k << ',' << ranked[r].logTestCount << ',' << ranked[r].logProb << ','
           << ranked[r].lnfa << '\n';
        const Partition alt = selectFixedK(prepared.hierarchy, prepared.tables, ranked[r].k);
        saveLabels(alt.labels, prefix + ".top" + std::to_string(r + 1) + ".labels");
      }
      writeCsv(prefix + ".rank.csv", os.str());
    }
  }
  if (!a.errorHist.empty()) {
    const auto& m = prepared.errorModel;
    const auto density = m.density();
    auto os = csvStream();
    os << "binCenter,density\n";
    for (std::size_t b = 0; b < density.size(); ++b) os << (b + 0.5) * m.binWidth() << ',' << density[b] << '\n';
    writeCsv(a.errorHist, os.str());
  }
  std::cout << "leaves " << prepared.hierarchy.leafCount() << '\n'
            << "order " << p.order << '\n'
            << "lnfa " << std::setprecision(10) << p.lnfa << '\n';
  return 0;
}

// ---- saliency ------------------------------------------------------------

struct SaliencyArgs {
  std::string image;
  std::string out;
  std::string grid = "0.01:5000:30";
  SelectionFlags sel;
};

int cmdSaliency(const SaliencyArgs& a) {
  const auto alphas = parseGrid(a.grid);
  const SegmentOptions opt = toOptions(a.sel);
  const std::string prefix = outputPrefix(a.out.empty() ? defaultPrefix(a.image) + ".saliency" : a.out);
  const Image source = loadImage(a.image);
  const PreparedImage prepared = prepareImage(source, opt);
  SaliencyOptions so;
  so.boundaryEps = opt.boundaryEps;
  if (opt.boundaryPost) so.postProcess = &prepared.boundary;
  const SaliencyMap map = saliencyMap(prepared.hierarchy, prepared.tables, opt.testCount(), alphas, so);
  savePgm16(map.width, map.height, map.render(), prefix + ".pgm");
  auto os = csvStream();
  os << "alpha,regionCount\n";
  for (std::size_t i = 0; i < map.alphas.size(); ++i) os << map.alphas[i] << ',' << map.regionCounts[i] << '\n';
  writeCsv(prefix + ".csv", os.str());
  return 0;
}

// ---- eval ----------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string images;
  std::string out = "eval";
  bool multiscale = false;
  std::string grid = "0.01:5000:30";
  SelectionFlags sel;
};

// Prediction for `stem` inside `dir`, or nullopt.
std::optional<LabelMap> findPrediction(const fs::path& dir, const std::string& stem) {
  for (const char* suffix : {".labels.png", ".labels.csv", ".png", ".csv"}) {
    const fs::path p = dir / (stem + suffix);
    if (fs::is_regular_file(p)) return loadLabelMap(p.string());
  }
  if (fs::is_directory(dir / stem)) {
    auto gts = loadGroundTruths(dir.string(), stem);
    if (!gts.empty()) return gts.front();
  }
  return std::nullopt;
}

std::string scoresHeader() {
  return "spd,apdPQ,apdQP,mpd,precision,recall,fmeasure,pri,voi,covering,regions";
}

void writeScores(std::ostream& os, const ImageScores& s) {
  os << s.pd.spd << ',' << s.pd.apdPQ << ',' << s.pd.apdQP << ',' << s.pd.mpd << ',' << s.boundary.precision << ','
     << s.boundary.recall << ',' << s.boundary.fmeasure << ',' << s.region.pri << ',' << s.region.voi << ','
     << s.region.covering << ',' << s.regions;
}

int cmdEvalMultiscale(const EvalArgs& a, int jobs) {
  if (a.images.empty()) throw UsageError("--multiscale requires --images");
  if (!fs::is_directory(a.images)) throw UsageError("image directory not found: " + a.images);
  const auto alphas = parseGrid(a.grid);
  const SegmentOptions opt = toOptions(a.sel);
  std::vector<std::string> warnings;
  const auto items = loadDataset(a.images, a.gt, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  if (items.empty()) throw UsageError("no image of " + a.images + " has ground truth in " + a.gt);

  std::vector<PreparedImage> prepared(items.size());
  std::vector<std::vector<LabelMap>> gts;
  for (const auto& it : items) gts.push_back(it.gts);
  parallelFor(items.size(), jobs, [&](std::size_t i) { prepared[i] = prepareImage(loadImage(items[i].imagePath), opt); });
  const auto result = multiscaleEval(prepared, gts, alphas, opt, jobs);
  writeCsv(a.out + ".multiscale.csv", multiscaleCsv(result));
  auto os = csvStream();
  os << "odsAlpha,odsF,oisF\n" << result.odsAlpha << ',' << result.odsF << ',' << result.oisF << '\n';
  writeCsv(a.out + ".ods.csv", os.str());
  std::cout << "images " << items.size() << "\nods_alpha " << result.odsAlpha << "\nods_f " << result.odsF
            << "\nois_f " << result.oisF << '\n';
  return 0;
}

int cmdEval(const EvalArgs& a, int jobs) {
  if (!fs::is_directory(a.gt)) throw UsageError("ground-truth directory not found: " + a.gt);
  if (a.multiscale) return cmdEvalMultiscale(a, jobs);
  if (a.pred.empty()) throw UsageError("--pred is required unless --multiscale is given");
  if (!fs::is_directory(a.pred)) throw UsageError("prediction directory not found: " + a.pred);

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(a.gt))
    if (entry.is_directory()) names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());

  struct Row {
    std::string name;
    ImageScores scores;
  };
  std::vector<std::pair<std::string, LabelMap>> preds;
  for (const auto& name : names)
    if (auto p = findPrediction(a.pred, name)) preds.emplace_back(name, std::move(*p));
  if (preds.empty()) throw UsageError("no image name is shared by " + a.pred + " and " + a.gt);

  std::vector<Row> rows(preds.size());
  parallelFor(preds.size(), jobs, [&](std::size_t i) {
    const auto gts = loadGroundTruths(a.gt, preds[i].first);
    if (gts.empty()) throw IoError(a.gt + "/" + preds[i].first, "no gt_<k> label maps");
    rows[i] = {preds[i].first, scoreImage(preds[i].second, gts)};
  });

  auto per = csvStream();
  per << "image," << scoresHeader() << '\n';
  ImageScores mean;
  double regions = 0.0;
  for (const auto& r : rows) {
    per << r.name << ',';
    writeScores(per, r.scores);
    per << '\n';
    const auto& s = r.scores;
    mean.pd.spd += s.pd.spd;
    mean.pd.apdPQ += s.pd.apdPQ;
    mean.pd.apdQP += s.pd.apdQP;
    mean.pd.mpd += s.pd.mpd;
    mean.boundary.precision += s.boundary.precision;
    mean.boundary.recall += s.boundary.recall;
    mean.boundary.fmeasure += s.boundary.fmeasure;
    mean.region.pri += s.region.pri;
    mean.region.voi += s.region.voi;
    mean.region.covering += s.region.covering;
    regions += s.regions;
  }
  const double n = static_cast<double>(rows.size());
  auto agg = csvStream();
  agg << "images," << scoresHeader() << '\n'
      << rows.size() << ',' << mean.pd.spd / n << ',' << mean.pd.apdPQ / n << ',' << mean.pd.apdQP / n << ','
      << mean.pd.mpd / n << ',' << mean.boundary.precision / n << ',' << mean.boundary.recall / n << ','
      << mean.boundary.fmeasure / n << ',' << mean.region.pri / n << ',' << mean.region.voi / n << ','
      << mean.region.covering / n << ',' << regions / n << '\n';
  writeCsv(a.out + ".per_image.csv", per.str());
  writeCsv(a.out + ".summary.csv", agg.str());
  std::cout << agg.str();
  return 0;
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string kind;
  std::string means = "50,100,150,200";
  double sigma = -1.0;
  int size = 100;
  int width = 320;
  int height = 240;
  int count = 13;
  std::uint64_t seed = 0;
  std::string out;
  std::string gtDir;
};

int cmdSynth(const SynthArgs& a) {
  SyntheticImage s{Image(1, 1, ColorSpace::Gray), LabelMap(1, 1)};
  if (a.kind == "blocks") {
    std::vector<double> means;
    std::stringstream ss(a.means);
    for (std::string part; std::getline(ss, part, ',');) {
      try {
        means.push_back(std::stod(part));
      } catch (const std::exception&) {
        throw UsageError("--means must be comma-separated numbers");
      }
    }
    if (means.empty()) throw UsageError("--means is empty");
    if (a.size < 1) throw UsageError("--size must be positive");
    s = makeBlocks(means, a.sigma < 0 ? 10.0 : a.sigma, a.size, a.seed);
  } else {
    BlobOptions o;
    o.count = a.count;
    o.width = a.width;
    o.height = a.height;
    if (a.sigma >= 0) o.sigma = a.sigma;
    s = makeBlobs(o, a.seed);
  }
  const std::string prefix = outputPrefix(a.out.empty() ? a.kind : a.out);
  savePng8(s.image, prefix + ".png");
  saveLabelPng16(s.truth, prefix + ".gt.png");
  if (!a.gtDir.empty()) {
    const fs::path dir = fs::path(a.gtDir) / fs::path(prefix).filename();
    fs::create_directories(dir);
    saveLabelPng16(s.truth, (dir / "gt_0.png").string());
  }
  std::cout << "regions " << regionCount(s.truth) << '\n';
  return 0;
}

// ---- tune ----------------------------------------------------------------

struct TuneArgs {
  std::string images;
  std::string gt;
  double alphaMin = 0.01;
  double alphaMax = 5000.0;
  int budget = 20;
  std::string out = "tune.csv";
  SelectionFlags sel;
};

int cmdTune(const TuneArgs& a, int jobs) {
  if (!fs::is_directory(a.images)) throw UsageError("image directory not found: " + a.images);
  if (!fs::is_directory(a.gt)) throw UsageError("ground-truth directory not found: " + a.gt);
  if (!(a.alphaMin > 0.0 && a.alphaMin < a.alphaMax)) throw UsageError("need 0 < --alpha-min < --alpha-max");
  if (a.budget < 1) throw UsageError("--budget must be positive");
  const SegmentOptions opt = toOptions(a.sel);
  std::vector<std::string> warnings;
  const auto items = loadDataset(a.images, a.gt, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  if (items.empty()) throw UsageError("no image of " + a.images + " has ground truth in " + a.gt);

  std::vector<PreparedImage> prepared(items.size());
  std::vector<double> targets;
  for (const auto& it : items) targets.push_back(meanRegionCount(it.gts));
  parallelFor(items.size(), jobs, [&](std::size_t i) { prepared[i] = prepareImage(loadImage(items[i].imagePath), opt); });
  const auto result = tuneAlpha(prepared, targets, a.alphaMin, a.alphaMax, a.budget, opt, jobs);
  auto os = csvStream();
  os << "alpha,objective\n";
  for (const auto& [alpha, e] : result.trace) os << alpha << ',' << e << '\n';
  writeCsv(a.out, os.str());
  std::cout << "alpha " << std::setprecision(10) << result.alphaStar << "\nobjective " << result.objective << '\n';
  return 0;
}

// ---- hierarchy dump ------------------------------------------------------

struct DumpArgs {
  std::string image;
  std::string out;
  double lambda = 10.0;
  bool gray = false;
};

int cmdHierarchyDump(const DumpArgs& a) {
  if (a.lambda < 0.0) throw UsageError("--lambda must be non-negative");
  const std::string prefix = outputPrefix(a.out.empty() ? defaultPrefix(a.image) + ".hierarchy" : a.out);
  const Image working = workingImage(loadImage(a.image), a.gray);
  const Hierarchy h = pruneHierarchy(buildHierarchy(working), a.lambda);

  nlohmann::json doc;
  doc["width"] = h.width;
  doc["height"] = h.height;
  doc["channels"] = h.channels;
  doc["root"] = h.root;
  doc["leafCount"] = h.leafCount();
  auto& nodes = doc["nodes"] = nlohmann::json::array();
  for (const auto& n : h.nodes) {
    nlohmann::json j;
    j["id"] = n.id;
    j["children"] = n.isLeaf() ? nlohmann::json::array() : nlohmann::json::array({n.children[0], n.children[1]});
    j["parent"] = n.parent == kNoNode ? nlohmann::json(nullptr) : nlohmann::json(n.parent);
    j["area"] = n.area;
    const auto mean = n.mean();
    j["mean"] = std::vector<double>(mean.begin(), mean.begin() + h.channels);
    j["msError"] = n.msError;
    j["lambdaAppear"] = n.lambdaAppear;
    nodes.push_back(std::move(j));
  }
  if (h.leafCount() > 65536) {
    saveLabelCsv(h.leafLabels, prefix + ".leaves.csv");
    doc["leafMap"] = fs::path(prefix + ".leaves.csv").filename().string();
  } else {
    saveLabelPng16(h.leafLabels, prefix + ".leaves.png");
    doc["leafMap"] = fs::path(prefix + ".leaves.png").filename().string();
  }
  writeFileAtomic(prefix + ".json", doc.dump(1) + "\n");
  std::cout << "nodes " << h.nodes.size() << "\nleaves " << h.leafCount() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical image segmentation with a contrario partition selection"};
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads (default: HIERSEG_JOBS or the number of processors)")
      ->check(CLI::NonNegativeNumber);

  SegmentArgs seg;
  auto* segment = app.add_subcommand("segment", "Segment one image");
  segment->add_option("image", seg.image, "Input PNG/PPM/PGM")->required();
  segment->add_option("--out", seg.out, "Output prefix (default: image stem)");
  segment->add_option("--top-m", seg.topM, "Also rank the M best orders")->check(CLI::NonNegativeNumber);
  segment->add_option("--error-hist", seg.errorHist, "Write the error histogram to this CSV");
  addSelectionFlags(segment, seg.sel, true);

  SaliencyArgs sal;
  auto* saliency = app.add_subcommand("saliency", "Contour saliency over an alpha sweep");
  saliency->add_option("image", sal.image, "Input PNG/PPM/PGM")->required();
  saliency->add_option("--grid", sal.grid, "Log-spaced alpha grid a0:a1:steps")->capture_default_str();
  saliency->add_option("--out", sal.out, "Output prefix");
  addSelectionFlags(saliency, sal.sel, false);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  eval->add_option("--pred", ev.pred, "Directory of predicted label maps");
  eval->add_option("--gt", ev.gt, "Ground-truth directory (<name>/gt_<k>.png|csv)")->required();
  eval->add_option("--images", ev.images, "Image directory for --multiscale");
  eval->add_option("--out", ev.out, "Output prefix")->capture_default_str();
  eval->add_flag("--multiscale", ev.multiscale, "Run the pipeline over an alpha grid");
  eval->add_option("--grid", ev.grid, "Alpha grid for --multiscale")->capture_default_str();
  addSelectionFlags(eval, ev.sel, false);

  SynthArgs syn;
  auto* synth = app.add_subcommand("synth", "Generate synthetic test images");
  synth->add_option("kind", syn.kind, "blocks or blobs")->required()->check(CLI::IsMember({"blocks", "blobs"}));
  synth->add_option("--means", syn.means, "Block means, comma separated")->capture_default_str();
  synth->add_option("--sigma", syn.sigma, "Noise standard deviation (default 10)");
  synth->add_option("--size", syn.size, "Block image side")->capture_default_str();
  synth->add_option("--width", syn.width, "Blob image width")->capture_default_str();
  synth->add_option("--height", syn.height, "Blob image height")->capture_default_str();
  synth->add_option("--count", syn.count, "Number of blobs")->capture_default_str()->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", syn.seed, "Random seed")->capture_default_str();
  synth->add_option("--out", syn.out, "Output prefix (default: kind)");
  synth->add_option("--gt-dir", syn.gtDir, "Also write <dir>/<name>/gt_0.png");

  TuneArgs tn;
  auto* tune = app.add_subcommand("tune", "Fit alpha to ground-truth region counts");
  tune->add_option("--images", tn.images, "Image directory")->required();
  tune->add_option("--gt", tn.gt, "Ground-truth directory")->required();
  tune->add_option("--alpha-min", tn.alphaMin, "Lower end of the search range")->capture_default_str();
  tune->add_option("--alpha-max", tn.alphaMax, "Upper end of the search range")->capture_default_str();
  tune->add_option("--budget", tn.budget, "Number of objective evaluations")->capture_default_str();
  tune->add_option("--out", tn.out, "Trace CSV")->capture_default_str();
  addSelectionFlags(tune, tn.sel, false);

  DumpArgs dump;
  auto* hierarchy = app.add_subcommand("hierarchy", "Hierarchy tools");
  hierarchy->require_subcommand(1);
  auto* dumpCmd = hierarchy->add_subcommand("dump", "Write the pruned tree as JSON plus a leaf map");
  dumpCmd->add_option("image", dump.image, "Input PNG/PPM/PGM")->required();
  dumpCmd->add_option("--lambda", dump.lambda, "Pruning scale")->capture_default_str();
  dumpCmd->add_flag("--gray", dump.gray, "Use only the CIELab L channel");
  dumpCmd->add_option("--out", dump.out, "Output prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const int workers = resolveJobs(jobs);
    if (*segment) return cmdSegment(seg);
    if (*saliency) return cmdSaliency(sal);
    if (*eval) return cmdEval(ev, workers);
    if (*synth) return cmdSynth(syn);
    if (*tune) return cmdTune(tn, workers);
    if (*dumpCmd) return cmdHierarchyDump(dump);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

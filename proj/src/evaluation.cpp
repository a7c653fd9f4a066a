#include "hierseg/evaluation.hpp"

#include "hierseg/error.hpp"
#include "hierseg/io.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <sstream>

namespace fs = std::filesystem;

namespace hierseg {

namespace {

bool isImageFile(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

}  // namespace

std::vector<LabelMap> loadGroundTruths(const std::string& gtDir, const std::string& stem) {
  const fs::path dir = fs::path(gtDir) / stem;
  std::vector<fs::path> files;
  if (fs::is_directory(dir))
    for (const auto& entry : fs::directory_iterator(dir)) {
      const auto name = entry.path().filename().string();
      const auto ext = entry.path().extension().string();
      if (entry.is_regular_file() && name.rfind("gt_", 0) == 0 && (ext == ".png" || ext == ".csv"))
        files.push_back(entry.path());
    }
  std::sort(files.begin(), files.end());
  std::vector<LabelMap> out;
  for (const auto& f : files) out.push_back(loadLabelMap(f.string()));
  return out;
}

std::vector<DatasetItem> loadDataset(const std::string& imagesDir, const std::string& gtDir,
                                     std::vector<std::string>* warnings) {
  if (!fs::is_directory(imagesDir)) throw IoError(imagesDir, "not a directory");
  if (!fs::is_directory(gtDir)) throw IoError(gtDir, "not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(imagesDir))
    if (entry.is_regular_file() && isImageFile(entry.path())) files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<DatasetItem> items;
  for (const auto& f : files) {
    DatasetItem item{f.stem().string(), f.string(), loadGroundTruths(gtDir, f.stem().string())};
    if (item.gts.empty()) {
      if (warnings) warnings->push_back("no ground truth for " + item.name + ", skipped");
      continue;
    }
    items.push_back(std::move(item));
  }
  return items;
}

double meanRegionCount(const std::vector<LabelMap>& gts) {
  require(!gts.empty(), "meanRegionCount: no ground truth");
  double sum = 0.0;
  for (const auto& g : gts) sum += regionCount(g);
  return sum / static_cast<double>(gts.size());
}

ImageScores scoreImage(const LabelMap& pred, const std::vector<LabelMap>& gts) {
  require(!gts.empty(), "scoreImage: no ground truth");
  ImageScores s;
  for (const auto& gt : gts) {
    const auto pd = partitionDistances(gt, pred);
    const auto b = boundaryPRF(pred, gt);
    s.pd.spd += pd.spd;
    s.pd.apdPQ += pd.apdPQ;
    s.pd.apdQP += pd.apdQP;
    s.pd.mpd += pd.mpd;
    s.boundary.precision += b.precision;
    s.boundary.recall += b.recall;
    s.boundary.fmeasure += b.fmeasure;
  }
  const double n = static_cast<double>(gts.size());
  s.pd = {s.pd.spd / n, s.pd.apdPQ / n, s.pd.apdQP / n, s.pd.mpd / n};
  s.boundary = {s.boundary.precision / n, s.boundary.recall / n, s.boundary.fmeasure / n};
  s.region = regionMetrics(pred, gts);
  s.regions = regionCount(pred);
  return s;
}

MultiscaleResult multiscaleEval(const std::vector<PreparedImage>& images, const std::vector<std::vector<LabelMap>>& gts,
                                const std::vector<double>& alphas, const SegmentOptions& options, int jobs) {
  require(!images.empty(), "multiscaleEval: empty dataset");
  require(images.size() == gts.size(), "multiscaleEval: one ground-truth set per image");
  require(!alphas.empty(), "multiscaleEval: empty alpha grid");

  const std::size_t ni = images.size(), na = alphas.size();
  std::vector<std::vector<ImageScores>> scores(ni, std::vector<ImageScores>(na));
  parallelFor(ni, jobs, [&](std::size_t i) {
    for (std::size_t a = 0; a < na; ++a) {
      SegmentOptions opt = options;
      opt.alpha = alphas[a];
      scores[i][a] = scoreImage(selectPartition(images[i], opt).labels, gts[i]);
    }
  });

  MultiscaleResult r;
  r.imageF.assign(ni, std::vector<double>(na, 0.0));
  for (std::size_t a = 0; a < na; ++a) {
    MultiscaleRow row;
    row.alpha = alphas[a];
    for (std::size_t i = 0; i < ni; ++i) {
      const auto& s = scores[i][a];
      row.pd.spd += s.pd.spd;
      row.pd.apdPQ += s.pd.apdPQ;
      row.pd.apdQP += s.pd.apdQP;
      row.pd.mpd += s.pd.mpd;
      row.boundary.precision += s.boundary.precision;
      row.boundary.recall += s.boundary.recall;
      row.boundary.fmeasure += s.boundary.fmeasure;
      row.meanRegions += s.regions;
      r.imageF[i][a] = s.boundary.fmeasure;
    }
    const double n = static_cast<double>(ni);
    row.pd = {row.pd.spd / n, row.pd.apdPQ / n, row.pd.apdQP / n, row.pd.mpd / n};
    row.boundary = {row.boundary.precision / n, row.boundary.recall / n, row.boundary.fmeasure / n};
    row.meanRegions /= n;
    if (a == 0 || row.boundary.fmeasure > r.odsF) {
      r.odsF = row.boundary.fmeasure;
      r.odsAlpha = row.alpha;
    }
    r.rows.push_back(row);
  }
  for (const auto& f : r.imageF) r.oisF += *std::max_element(f.begin(), f.end());
  r.oisF /= static_cast<double>(ni);
  return r;
}

std::string multiscaleCsv(const MultiscaleResult& result) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "alpha,spd,apdPQ,apdQP,mpd,precision,recall,fmeasure,meanRegions\n";
  for (const auto& r : result.rows)
    os << r.alpha << ',' << r.pd.spd << ',' << r.pd.apdPQ << ',' << r.pd.apdQP << ',' << r.pd.mpd << ','
       << r.boundary.precision << ',' << r.boundary.recall << ',' << r.boundary.fmeasure << ',' << r.meanRegions
       << '\n';
  return os.str();
}

}  // namespace hierseg

#include "elc/datasynth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>

#include "elc/error.hpp"
#include "elc/io_util.hpp"

namespace elc {

namespace fs = std::filesystem;

const char* synth_kind_name(SynthKind k) {
  return k == SynthKind::BeaconParity ? "beacon-parity" : "region-fill";
}

SynthKind synth_kind_from_name(const std::string& name) {
  if (name == "beacon-parity") return SynthKind::BeaconParity;
  if (name == "region-fill") return SynthKind::RegionFill;
  throw ConfigError("unknown synth kind '" + name + "'");
}

void SynthTaskSpec::validate() const {
  if (height == 0 || width == 0) {
    throw ContractError("synth: grid extents must be positive");
  }
  if (dependency >= std::min(height, width)) {
    throw ContractError("synth: dependency distance must be < min(H, W)");
  }
  if (num_classes < 2) throw ContractError("synth: need at least 2 classes");
  if (noise < 0.0) throw ContractError("synth: noise must be >= 0");
  if (kind == SynthKind::BeaconParity &&
      (beacon_density <= 0.0 || beacon_density > 1.0)) {
    throw ContractError("synth: beacon density must be in (0, 1]");
  }
}

double quantize_unit(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return std::round(v * 255.0) / 255.0;
}

std::vector<int> beacon_parity_labels(size_t height, size_t width,
                                      std::span<const int> beacon_class,
                                      size_t dependency) {
  if (beacon_class.size() != height * width) {
    throw DimensionError("beacon_parity_labels: beacon map size mismatch");
  }
  std::vector<int> labels(height * width, 0);
  const long H = static_cast<long>(height), W = static_cast<long>(width);
  for (long r = 0; r < H; ++r) {
    for (long c = 0; c < W; ++c) {
      int label = 0;
      for (long d = 0; d <= static_cast<long>(dependency); ++d) {
        // Fixed probe order defines the tie rule: self, then at each
        // distance left, right, up, down.
        const std::pair<long, long> probes[4] = {
            {r, c - d}, {r, c + d}, {r - d, c}, {r + d, c}};
        int found = -1;
        if (d == 0) {
          found = beacon_class[r * W + c];
        } else {
          for (const auto& [pr, pc] : probes) {
            if (pr < 0 || pc < 0 || pr >= H || pc >= W) continue;
            const int b = beacon_class[pr * W + pc];
            if (b >= 0) {
              found = b;
              break;
            }
          }
        }
        if (found >= 0) {
          label = found;
          break;
        }
      }
      labels[r * W + c] = label;
    }
  }
  return labels;
}

namespace {

constexpr size_t kChannels = 3;

void add_noise_and_quantize(std::vector<double>& pixels, double noise,
                            Rng& rng) {
  if (noise > 0.0) {
    for (double& v : pixels) v += rng.next_gaussian(0.0, noise);
  }
  for (double& v : pixels) v = quantize_unit(v);
}

double class_code(int cls, size_t num_classes) {
  if (num_classes <= 1) return 0.0;
  return quantize_unit(static_cast<double>(cls) /
                       static_cast<double>(num_classes - 1));
}

}  // namespace

std::vector<LabeledGrid> gen_beacon_parity(const SynthTaskSpec& spec) {
  spec.validate();
  std::vector<LabeledGrid> out;
  out.reserve(spec.count);
  const size_t H = spec.height, W = spec.width;
  for (size_t sample = 0; sample < spec.count; ++sample) {
    Rng rng(derive_seed(spec.seed, "beacon-sample", sample));
    std::vector<int> beacon(H * W, -1);
    for (size_t i = 0; i < H * W; ++i) {
      if (rng.next_uniform() < spec.beacon_density) {
        beacon[i] = static_cast<int>(rng.next_index(spec.num_classes));
      }
    }
    std::vector<double> pixels(H * W * kChannels, 0.0);
    for (size_t i = 0; i < H * W; ++i) {
      double* px = pixels.data() + i * kChannels;
      if (beacon[i] >= 0) {
        px[0] = 1.0;
        px[1] = class_code(beacon[i], spec.num_classes);
        px[2] = 0.5;
      } else {
        px[0] = 0.0;
        px[1] = 0.0;
        px[2] = 0.5;
      }
    }
    add_noise_and_quantize(pixels, spec.noise, rng);
    LabeledGrid g;
    g.image = Tensor::from_data({H, W, kChannels}, std::move(pixels));
    g.labels = beacon_parity_labels(H, W, beacon, spec.dependency);
    out.push_back(std::move(g));
  }
  return out;
}

LabeledGrid render_region_sample(size_t height, size_t width,
                                 std::span<const RectSpec> rects,
                                 size_t num_classes) {
  const size_t H = height, W = width;
  std::vector<double> pixels(H * W * kChannels, 0.0);
  std::vector<int> labels(H * W, 0);
  for (size_t z = 0; z < rects.size(); ++z) {
    const RectSpec& rect = rects[z];
    if (rect.row0 + rect.rect_height > H || rect.col0 + rect.rect_width > W ||
        rect.rect_height < 2 || rect.rect_width < 2) {
      throw ContractError("render_region_sample: rectangle out of bounds");
    }
    const double region_id = quantize_unit(static_cast<double>(z + 1) /
                                           static_cast<double>(rects.size() + 1));
    for (size_t r = rect.row0; r < rect.row0 + rect.rect_height; ++r) {
      for (size_t c = rect.col0; c < rect.col0 + rect.rect_width; ++c) {
        const bool border = r == rect.row0 || c == rect.col0 ||
                            r == rect.row0 + rect.rect_height - 1 ||
                            c == rect.col0 + rect.rect_width - 1;
        double* px = pixels.data() + (r * W + c) * kChannels;
        px[0] = border ? 1.0 : 0.0;
        px[1] = border ? class_code(rect.cls, num_classes) : 0.0;
        px[2] = region_id;
        labels[r * W + c] = rect.cls;
      }
    }
  }
  LabeledGrid g;
  g.image = Tensor::from_data({H, W, kChannels}, std::move(pixels));
  g.labels = std::move(labels);
  return g;
}

namespace {

// True when flooding from visible border pixels (within equal region-id
// areas) reaches every labeled pixel with the right class. Guards against
// z-order overlaps that bury a rectangle's entire border.
bool region_sample_reconstructible(const LabeledGrid& g) {
  const size_t H = g.height(), W = g.width();
  auto img = g.image.data();
  std::vector<int> reached(H * W, -1);
  std::deque<size_t> queue;
  auto id_of = [&](size_t i) { return img[i * kChannels + 2]; };
  for (size_t i = 0; i < H * W; ++i) {
    if (img[i * kChannels] > 0.5) {  // border pixel
      reached[i] = g.labels[i];
      queue.push_back(i);
    } else if (id_of(i) == 0.0) {  // background
      reached[i] = 0;
    }
  }
  while (!queue.empty()) {
    const size_t i = queue.front();
    queue.pop_front();
    const size_t r = i / W, c = i % W;
    const size_t neighbors[4] = {r > 0 ? i - W : i, r + 1 < H ? i + W : i,
                                 c > 0 ? i - 1 : i, c + 1 < W ? i + 1 : i};
    for (size_t j : neighbors) {
      if (j == i || reached[j] >= 0) continue;
      if (id_of(j) == id_of(i)) {
        reached[j] = reached[i];
        queue.push_back(j);
      }
    }
  }
  for (size_t i = 0; i < H * W; ++i) {
    if (reached[i] != g.labels[i]) return false;
  }
  return true;
}

}  // namespace

std::vector<LabeledGrid> gen_region_fill(const SynthTaskSpec& spec) {
  spec.validate();
  std::vector<LabeledGrid> out;
  out.reserve(spec.count);
  const size_t H = spec.height, W = spec.width;
  const size_t min_side = 4;
  const size_t max_side = std::max(min_side + 1, std::min(H, W) / 2);
  for (size_t sample = 0; sample < spec.count; ++sample) {
    Rng rng(derive_seed(spec.seed, "region-sample", sample));
    LabeledGrid g;
    for (int attempt = 0; attempt < 64; ++attempt) {
      std::vector<RectSpec> rects(spec.region_count);
      for (RectSpec& rect : rects) {
        rect.rect_height = min_side + rng.next_index(max_side - min_side + 1);
        rect.rect_width = min_side + rng.next_index(max_side - min_side + 1);
        rect.row0 = rng.next_index(H - rect.rect_height + 1);
        rect.col0 = rng.next_index(W - rect.rect_width + 1);
        rect.cls = spec.num_classes > 2
                       ? 1 + static_cast<int>(rng.next_index(spec.num_classes - 1))
                       : 1;
      }
      g = render_region_sample(H, W, rects, spec.num_classes);
      if (region_sample_reconstructible(g)) break;
      if (attempt == 63) {
        throw ContractError(
            "gen_region_fill: could not draw a reconstructible sample");
      }
    }
    std::vector<double> pixels(g.image.data().begin(), g.image.data().end());
    add_noise_and_quantize(pixels, spec.noise, rng);
    g.image = Tensor::from_data({H, W, kChannels}, std::move(pixels));
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<LabeledGrid> generate_dataset(const SynthTaskSpec& spec) {
  return spec.kind == SynthKind::BeaconParity ? gen_beacon_parity(spec)
                                              : gen_region_fill(spec);
}

// ---- netpbm ---------------------------------------------------------

namespace {

std::string netpbm_header(const char* magic, size_t w, size_t h) {
  return std::string(magic) + "\n" + std::to_string(w) + " " +
         std::to_string(h) + "\n255\n";
}

struct PnmHeader {
  std::string magic;
  size_t width = 0, height = 0, maxval = 0;
  size_t data_offset = 0;
};

PnmHeader parse_pnm_header(const std::string& bytes, const std::string& path) {
  PnmHeader h;
  size_t pos = 0;
  auto fail = [&](const std::string& why) -> PnmHeader& {
    throw DataError("malformed netpbm header in " + path + ": " + why);
  };
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    size_t start = pos;
    while (pos < bytes.size() &&
           !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    }
    if (start == pos) fail("truncated header");
    return bytes.substr(start, pos - start);
  };
  h.magic = next_token();
  if (h.magic != "P5" && h.magic != "P6") fail("magic '" + h.magic + "'");
  auto parse_num = [&](const std::string& tok) -> size_t {
    size_t v = 0;
    for (char c : tok) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        fail("non-numeric field '" + tok + "'");
      v = v * 10 + static_cast<size_t>(c - '0');
    }
    return v;
  };
  h.width = parse_num(next_token());
  h.height = parse_num(next_token());
  h.maxval = parse_num(next_token());
  if (h.width == 0 || h.height == 0) fail("zero extent");
  if (h.maxval != 255) fail("maxval must be 255");
  if (pos >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    fail("missing whitespace before raster");
  }
  h.data_offset = pos + 1;
  return h;
}

}  // namespace

void write_netpbm_pair(const LabeledGrid& grid, const std::string& image_path,
                       const std::string& label_path) {
  const size_t H = grid.height(), W = grid.width();
  if (grid.channels() != 3) {
    throw DataError("write_netpbm_pair: P6 requires 3 channels, image has " +
                    std::to_string(grid.channels()));
  }
  if (grid.labels.size() != H * W) {
    throw DataError("write_netpbm_pair: label count mismatch");
  }
  std::string ppm = netpbm_header("P6", W, H);
  ppm.reserve(ppm.size() + H * W * 3);
  for (double v : grid.image.data()) {
    ppm.push_back(static_cast<char>(
        static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
  }
  std::string pgm = netpbm_header("P5", W, H);
  pgm.reserve(pgm.size() + H * W);
  for (int label : grid.labels) {
    pgm.push_back(static_cast<char>(
        static_cast<unsigned char>(label == LabeledGrid::kIgnore ? 255 : label)));
  }
  atomic_write_file(image_path, ppm);
  atomic_write_file(label_path, pgm);
}

LabeledGrid load_netpbm_pair(const std::string& image_path,
                             const std::string& label_path,
                             size_t num_classes) {
  const std::string img_bytes = read_file(image_path);
  const PnmHeader ih = parse_pnm_header(img_bytes, image_path);
  if (ih.magic != "P6") {
    throw DataError("expected P6 image in " + image_path);
  }
  const size_t H = ih.height, W = ih.width;
  if (img_bytes.size() - ih.data_offset < H * W * 3) {
    throw DataError("truncated raster in " + image_path);
  }
  std::vector<double> pixels(H * W * 3);
  for (size_t i = 0; i < H * W * 3; ++i) {
    pixels[i] = static_cast<double>(static_cast<unsigned char>(
                    img_bytes[ih.data_offset + i])) /
                255.0;
  }

  const std::string lab_bytes = read_file(label_path);
  const PnmHeader lh = parse_pnm_header(lab_bytes, label_path);
  if (lh.magic != "P5") {
    throw DataError("expected P5 label map in " + label_path);
  }
  if (lh.width != W || lh.height != H) {
    throw DataError("extent mismatch between " + image_path + " (" +
                    std::to_string(W) + "x" + std::to_string(H) + ") and " +
                    label_path + " (" + std::to_string(lh.width) + "x" +
                    std::to_string(lh.height) + ")");
  }
  if (lab_bytes.size() - lh.data_offset < H * W) {
    throw DataError("truncated raster in " + label_path);
  }
  std::vector<int> labels(H * W);
  for (size_t i = 0; i < H * W; ++i) {
    const unsigned char v =
        static_cast<unsigned char>(lab_bytes[lh.data_offset + i]);
    if (v == 255) {
      labels[i] = LabeledGrid::kIgnore;
    } else if (static_cast<size_t>(v) >= num_classes) {
      throw DataError("label value " + std::to_string(v) + " >= num_classes " +
                      std::to_string(num_classes) + " in " + label_path);
    } else {
      labels[i] = static_cast<int>(v);
    }
  }
  LabeledGrid g;
  g.image = Tensor::from_data({H, W, 3}, std::move(pixels));
  g.labels = std::move(labels);
  return g;
}

std::vector<LabeledGrid> load_pairs(const std::string& image_dir,
                                    const std::string& label_dir,
                                    size_t num_classes) {
  std::map<std::string, fs::path> images;
  for (const auto& entry : fs::directory_iterator(image_dir)) {
    if (entry.path().extension() == ".ppm") {
      images[entry.path().stem().string()] = entry.path();
    }
  }
  if (images.empty()) {
    throw DataError("no .ppm images in " + image_dir);
  }
  std::vector<LabeledGrid> out;
  for (const auto& [stem, image_path] : images) {
    const fs::path label_path = fs::path(label_dir) / (stem + ".pgm");
    if (!fs::exists(label_path)) {
      throw DataError("missing label file for image " + image_path.string() +
                      ": " + label_path.string());
    }
    out.push_back(
        load_netpbm_pair(image_path.string(), label_path.string(), num_classes));
  }
  return out;
}

void write_dataset(const std::vector<LabeledGrid>& dataset,
                   const std::string& dir) {
  fs::create_directories(fs::path(dir) / "images");
  fs::create_directories(fs::path(dir) / "labels");
  std::string manifest;
  for (size_t i = 0; i < dataset.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "sample_%05zu", i);
    const fs::path img = fs::path(dir) / "images" / (std::string(name) + ".ppm");
    const fs::path lab = fs::path(dir) / "labels" / (std::string(name) + ".pgm");
    write_netpbm_pair(dataset[i], img.string(), lab.string());
    manifest += img.string() + "\t" + lab.string() + "\n";
  }
  atomic_write_file((fs::path(dir) / "manifest.tsv").string(), manifest);
}

std::vector<LabeledGrid> load_manifest(const std::string& manifest_path,
                                       size_t num_classes) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open manifest: " + manifest_path);
  std::vector<LabeledGrid> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("manifest line " + std::to_string(line_no) +
                      " has no tab separator in " + manifest_path);
    }
    out.push_back(load_netpbm_pair(line.substr(0, tab), line.substr(tab + 1),
                                   num_classes));
  }
  if (out.empty()) {
    throw DataError("manifest is empty: " + manifest_path);
  }
  return out;
}

}  // namespace elc

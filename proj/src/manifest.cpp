#include "srforge/manifest.hpp"

#include <algorithm>
#include <json.hpp>

#include "srforge/config_io.hpp"
#include "srforge/parallel.hpp"
#include "srforge/resize.hpp"

namespace srforge {

namespace fs = std::filesystem;
using nlohmann::json;

std::array<float, 3> compute_rgb_mean(const std::vector<Image>& images) {
  std::array<double, 3> sum{0.0, 0.0, 0.0};
  double count = 0.0;
  for (const auto& img : images) {
    for (std::size_t i = 0; i < img.rgb.size(); i += 3) {
      for (int c = 0; c < 3; ++c) sum[c] += img.rgb[i + c];
    }
    count += static_cast<double>(img.width) * img.height;
  }
  if (count == 0.0) return {0.0f, 0.0f, 0.0f};
  return {static_cast<float>(sum[0] / count), static_cast<float>(sum[1] / count),
          static_cast<float>(sum[2] / count)};
}

PrepareResult prepare_dataset(const fs::path& hr_dir, const fs::path& out_dir, const PrepareOptions& options) {
  if (!fs::is_directory(hr_dir)) throw ConfigError("not a directory: " + hr_dir.string());
  for (int s : options.scales) {
    if (s < 2 || s > 4) throw ConfigError("unsupported scale " + std::to_string(s));
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(hr_dir)) {
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (e.is_regular_file() && ext == ".png") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no PNG images in " + hr_dir.string());

  fs::create_directories(out_dir / "HR");
  for (int s : options.scales) fs::create_directories(out_dir / "LR_bicubic" / ("X" + std::to_string(s)));

  struct Slot {
    bool ok = false;
    std::string error;
    ManifestEntry entry;
    Image hr;
  };
  std::vector<Slot> slots(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    Slot& slot = slots[i];
    const std::string name = files[i].stem().string();
    try {
      const Image full = read_png(files[i]);
      const int w = full.width - full.width % kHrCropMultiple;
      const int h = full.height - full.height % kHrCropMultiple;
      if (w == 0 || h == 0) throw ImageError("smaller than " + std::to_string(kHrCropMultiple) + " px");
      slot.hr = crop(full, 0, 0, w, h);
      slot.entry.name = name;
      slot.entry.hr = fs::path("HR") / (name + ".png");
      slot.entry.split = options.val_names.count(name) ? "val" : "train";
      write_png(slot.hr, out_dir / slot.entry.hr);
      for (int s : options.scales) {
        const fs::path rel = fs::path("LR_bicubic") / ("X" + std::to_string(s)) / (name + ".png");
        write_png(bicubic_resize(slot.hr, w / s, h / s, true), out_dir / rel);
        slot.entry.lr[s] = rel;
      }
      slot.ok = true;
    } catch (const std::exception& e) {
      slot.error = files[i].filename().string() + ": " + e.what();
    }
  });

  PrepareResult result;
  Manifest& m = result.manifest;
  m.dataset = options.dataset;
  m.scales = options.scales;
  m.root = out_dir;
  std::vector<Image> train_images;
  for (auto& slot : slots) {
    if (!slot.ok) {
      result.skipped.push_back(slot.error);
      continue;
    }
    if (slot.entry.split == "train") train_images.push_back(std::move(slot.hr));
    m.entries.push_back(std::move(slot.entry));
  }
  if (m.entries.empty()) throw ConfigError("no usable images in " + hr_dir.string());
  m.rgb_mean = compute_rgb_mean(train_images);
  save_manifest(m, out_dir / "manifest.json");
  return result;
}

void save_manifest(const Manifest& m, const fs::path& path) {
  json entries = json::array();
  for (const auto& e : m.entries) {
    json lr = json::object();
    for (const auto& [s, p] : e.lr) lr[std::to_string(s)] = p.generic_string();
    entries.push_back({{"name", e.name}, {"hr", e.hr.generic_string()}, {"lr", lr}, {"split", e.split}});
  }
  write_json_file({{"schema_version", kConfigSchemaVersion},
                   {"dataset", m.dataset},
                   {"scales", m.scales},
                   {"rgb_mean", m.rgb_mean},
                   {"images", entries}},
                  path);
}

Manifest load_manifest(const fs::path& path) {
  const json j = read_json_file(path);
  Manifest m;
  try {
    if (j.at("schema_version").get<int>() != kConfigSchemaVersion) {
      throw ConfigError("manifest.schema_version: expected " + std::to_string(kConfigSchemaVersion));
    }
    for (const auto& [key, _] : j.items()) {
      static const std::set<std::string> known{"schema_version", "dataset", "scales", "rgb_mean", "images"};
      if (!known.count(key)) throw ConfigError("manifest." + key + ": unknown key");
    }
    m.dataset = j.at("dataset").get<std::string>();
    m.scales = j.at("scales").get<std::vector<int>>();
    m.rgb_mean = j.at("rgb_mean").get<std::array<float, 3>>();
    for (const auto& e : j.at("images")) {
      ManifestEntry entry;
      entry.name = e.at("name").get<std::string>();
      entry.hr = e.at("hr").get<std::string>();
      entry.split = e.value("split", std::string("train"));
      for (const auto& [s, p] : e.at("lr").items()) entry.lr[std::stoi(s)] = p.get<std::string>();
      m.entries.push_back(std::move(entry));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path.string() + ": malformed manifest: " + e.what());
  }
  m.root = path.parent_path();
  return m;
}

TrainingSet load_training_set(const Manifest& m, const std::vector<int>& scales, const std::string& split) {
  TrainingSet set;
  for (const auto& e : m.entries) {
    if (e.split != split) continue;
    const Tensor hr = to_tensor(read_png(m.root / e.hr));
    for (int s : scales) {
      auto it = e.lr.find(s);
      if (it == e.lr.end()) throw ConfigError(e.name + ": manifest has no x" + std::to_string(s) + " LR image");
      set.by_scale[s].push_back({e.name, to_tensor(read_png(m.root / it->second)), hr});
    }
  }
  if (set.by_scale.empty()) throw ConfigError("manifest has no images in split \"" + split + "\"");
  return set;
}

}  // namespace srforge

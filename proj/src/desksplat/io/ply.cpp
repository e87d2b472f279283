#include "desksplat/io/ply.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

namespace desksplat {

namespace {

constexpr int kRestCount = 3 * (kShCoeffCount - 1);  // 45

std::vector<std::string> layout_names() {
  std::vector<std::string> names = {"x", "y", "z", "nx", "ny", "nz",
                                    "f_dc_0", "f_dc_1", "f_dc_2"};
  for (int i = 0; i < kRestCount; ++i) names.push_back("f_rest_" + std::to_string(i));
  names.insert(names.end(), {"opacity", "scale_0", "scale_1", "scale_2",
                             "rot_0", "rot_1", "rot_2", "rot_3"});
  return names;
}

float f32(double v) { return static_cast<float>(v); }

}  // namespace

void export_ply(const std::string& path, const std::vector<GaussianSplat>& splats) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("export_ply: cannot write " + path);
  f << "ply\nformat binary_little_endian 1.0\n"
    << "element vertex " << splats.size() << "\n";
  for (const auto& name : layout_names()) f << "property float " << name << "\n";
  f << "end_header\n";

  std::vector<float> row(9 + kRestCount + 8);
  for (const auto& g : splats) {
    int k = 0;
    for (int i = 0; i < 3; ++i) row[k++] = f32(g.mu[i]);
    for (int i = 0; i < 3; ++i) row[k++] = 0.0f;  // nx, ny, nz
    for (int ch = 0; ch < 3; ++ch) row[k++] = f32(g.sh(0, ch));
    for (int ch = 0; ch < 3; ++ch)
      for (int j = 1; j < kShCoeffCount; ++j) row[k++] = f32(g.sh(j, ch));
    row[k++] = f32(g.opacity);
    for (int i = 0; i < 3; ++i) row[k++] = f32(g.log_scale[i]);
    for (int i = 0; i < 4; ++i) row[k++] = f32(g.rot[i]);
    f.write(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(float));
  }
  if (!f) throw io_error("export_ply: short write to " + path);
}

std::vector<GaussianSplat> import_ply(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("import_ply: cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != "ply") throw io_error("import_ply: not a PLY file: " + path);

  size_t vertex_count = 0;
  struct Prop {
    std::string name;
    int size = 4;
    bool is_double = false;
  };
  std::vector<Prop> props;
  bool in_vertex = false;
  bool binary_le = false;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "format") {
      std::string fmt;
      ss >> fmt;
      binary_le = fmt == "binary_little_endian";
      if (!binary_le) throw io_error("import_ply: unsupported format " + fmt);
    } else if (tok == "element") {
      std::string kind;
      size_t n;
      ss >> kind >> n;
      in_vertex = kind == "vertex";
      if (in_vertex) vertex_count = n;
    } else if (tok == "property" && in_vertex) {
      std::string type, name;
      ss >> type >> name;
      Prop p;
      p.name = name;
      if (type == "float" || type == "float32") {
        p.size = 4;
      } else if (type == "double" || type == "float64") {
        p.size = 8;
        p.is_double = true;
      } else if (type == "uchar" || type == "uint8" || type == "char" || type == "int8") {
        p.size = 1;
      } else if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") {
        p.size = 2;
      } else if (type == "int" || type == "uint" || type == "int32" || type == "uint32") {
        p.size = 4;
        p.name = "";  // integer properties are skipped
      } else {
        throw io_error("import_ply: unsupported property type " + type);
      }
      props.push_back(p);
    } else if (tok == "end_header") {
      break;
    }
  }

  std::map<std::string, int> index;  // property name -> position in props
  for (size_t i = 0; i < props.size(); ++i)
    if (!props[i].name.empty()) index[props[i].name] = static_cast<int>(i);

  std::vector<std::string> required = {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2",
                                       "opacity", "scale_0", "scale_1", "scale_2",
                                       "rot_0", "rot_1", "rot_2", "rot_3"};
  std::string missing;
  for (const auto& name : required)
    if (!index.count(name)) missing += (missing.empty() ? "" : ", ") + name;
  if (!missing.empty())
    throw io_error("import_ply: " + path + " lacks required properties: " + missing);

  int rest_count = 0;
  while (index.count("f_rest_" + std::to_string(rest_count))) ++rest_count;
  if (rest_count % 3 != 0)
    throw io_error("import_ply: f_rest count not divisible by 3 in " + path);
  const int rest_per_channel = rest_count / 3;
  if (rest_per_channel > kShCoeffCount - 1)
    throw io_error("import_ply: too many f_rest coefficients in " + path);

  size_t stride = 0;
  for (const auto& p : props) stride += p.size;
  std::vector<char> row(stride);
  std::vector<size_t> offsets(props.size());
  {
    size_t off = 0;
    for (size_t i = 0; i < props.size(); ++i) {
      offsets[i] = off;
      off += props[i].size;
    }
  }
  auto value_at = [&](int prop_idx) -> double {
    const Prop& p = props[prop_idx];
    if (p.is_double) {
      double v;
      std::memcpy(&v, row.data() + offsets[prop_idx], 8);
      return v;
    }
    float v;
    std::memcpy(&v, row.data() + offsets[prop_idx], 4);
    return v;
  };

  std::vector<GaussianSplat> splats(vertex_count);
  for (size_t s = 0; s < vertex_count; ++s) {
    f.read(row.data(), row.size());
    if (!f) throw io_error("import_ply: truncated vertex data in " + path);
    GaussianSplat& g = splats[s];
    g.mu = Vec3(value_at(index["x"]), value_at(index["y"]), value_at(index["z"]));
    for (int ch = 0; ch < 3; ++ch) g.sh(0, ch) = value_at(index["f_dc_" + std::to_string(ch)]);
    for (int ch = 0; ch < 3; ++ch)
      for (int j = 0; j < rest_per_channel; ++j)
        g.sh(j + 1, ch) = value_at(index["f_rest_" + std::to_string(ch * rest_per_channel + j)]);
    g.opacity = value_at(index["opacity"]);
    for (int i = 0; i < 3; ++i) g.log_scale[i] = value_at(index["scale_" + std::to_string(i)]);
    for (int i = 0; i < 4; ++i) g.rot[i] = value_at(index["rot_" + std::to_string(i)]);
  }
  return splats;
}

void quantize_to_storage(Scene* scene) {
  // The volatile round trip forces a real narrowing per element; without it
  // the -O3 vectorizer has been seen to merge these stores and skip some of
  // the float conversions.
  auto q = [](double v) {
    volatile float f = static_cast<float>(v);
    return static_cast<double>(f);
  };
  for (auto& g : scene->splats) {
    for (int i = 0; i < 3; ++i) {
      g.mu[i] = q(g.mu[i]);
      g.log_scale[i] = q(g.log_scale[i]);
    }
    for (int i = 0; i < 4; ++i) g.rot[i] = q(g.rot[i]);
    g.opacity = q(g.opacity);
    for (int i = 0; i < kShCoeffCount; ++i)
      for (int ch = 0; ch < 3; ++ch) g.sh(i, ch) = q(g.sh(i, ch));
  }
}

void save_checkpoint(const std::string& prefix, const Scene& scene) {
  export_ply(prefix + ".ply", scene.splats);
  nlohmann::json meta;
  meta["iteration"] = scene.iteration;
  auto& per = meta["splats"];
  per["ref_view"] = nlohmann::json::array();
  per["max_weight"] = nlohmann::json::array();
  per["init_ref_view"] = nlohmann::json::array();
  per["init_depth_ratio"] = nlohmann::json::array();
  for (const auto& g : scene.splats) {
    per["ref_view"].push_back(g.ref_view);
    per["max_weight"].push_back(g.max_weight);
    per["init_ref_view"].push_back(g.init_ref_view);
    per["init_depth_ratio"].push_back(g.init_depth_ratio);
  }
  std::ofstream f(prefix + ".meta.json");
  if (!f) throw io_error("save_checkpoint: cannot write " + prefix + ".meta.json");
  f << meta.dump(1) << "\n";
}

Scene load_checkpoint(const std::string& prefix) {
  Scene scene;
  scene.splats = import_ply(prefix + ".ply");
  std::ifstream f(prefix + ".meta.json");
  if (f) {
    nlohmann::json meta = nlohmann::json::parse(f);
    scene.iteration = meta.value("iteration", 0);
    if (meta.contains("splats")) {
      const auto& per = meta["splats"];
      const size_t n = scene.splats.size();
      auto arr = [&](const char* key) -> const nlohmann::json& { return per.at(key); };
      if (arr("ref_view").size() != n)
        throw io_error("load_checkpoint: sidecar size mismatch for " + prefix);
      for (size_t i = 0; i < n; ++i) {
        scene.splats[i].ref_view = arr("ref_view")[i].get<int>();
        scene.splats[i].max_weight = arr("max_weight")[i].get<double>();
        scene.splats[i].init_ref_view = arr("init_ref_view")[i].get<int>();
        scene.splats[i].init_depth_ratio = arr("init_depth_ratio")[i].get<double>();
      }
    }
  }
  return scene;
}

}  // namespace desksplat

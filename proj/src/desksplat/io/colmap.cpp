#include "desksplat/io/colmap.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace desksplat {

namespace {

struct LineReader {
  std::ifstream f;
  std::string path;
  int line_no = 0;
  explicit LineReader(const std::string& p) : f(p), path(p) {
    if (!f) throw io_error("parse_colmap: cannot open " + p);
  }
  // Next non-empty, non-comment line; false at EOF.
  bool next(std::string* line) {
    while (std::getline(f, *line)) {
      ++line_no;
      size_t start = line->find_first_not_of(" \t\r");
      if (start == std::string::npos) continue;
      if ((*line)[start] == '#') continue;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw io_error(path + ":" + std::to_string(line_no) + ": " + what);
  }
};

struct RawCamera {
  std::string model;
  int width = 0, height = 0;
  std::vector<double> params;
};

std::map<int, RawCamera> parse_cameras(const std::string& path) {
  LineReader r(path);
  std::map<int, RawCamera> cams;
  std::string line;
  while (r.next(&line)) {
    std::istringstream ss(line);
    int id;
    RawCamera cam;
    if (!(ss >> id >> cam.model >> cam.width >> cam.height))
      r.fail("malformed camera record");
    double p;
    while (ss >> p) cam.params.push_back(p);
    if (cam.model == "PINHOLE") {
      if (cam.params.size() != 4) r.fail("PINHOLE expects 4 params");
    } else if (cam.model == "SIMPLE_PINHOLE") {
      if (cam.params.size() != 3) r.fail("SIMPLE_PINHOLE expects 3 params");
    } else {
      r.fail("unsupported camera model " + cam.model);
    }
    cams[id] = cam;
  }
  return cams;
}

}  // namespace

ColmapReconstruction parse_colmap(const std::string& dir) {
  const auto cams = parse_cameras(dir + "/cameras.txt");

  ColmapReconstruction rec;
  // image id -> (view index, per-image keypoint list)
  std::map<int, std::vector<Vec2>> keypoints;
  {
    LineReader r(dir + "/images.txt");
    std::string line;
    while (r.next(&line)) {
      std::istringstream ss(line);
      int image_id, camera_id;
      double qw, qx, qy, qz, tx, ty, tz;
      std::string name;
      if (!(ss >> image_id >> qw >> qx >> qy >> qz >> tx >> ty >> tz >> camera_id >> name))
        r.fail("malformed image record");
      auto it = cams.find(camera_id);
      if (it == cams.end()) r.fail("unknown camera id " + std::to_string(camera_id));
      const RawCamera& cam = it->second;

      CameraView v;
      v.id = image_id;
      v.name = name;
      v.width = cam.width;
      v.height = cam.height;
      if (cam.model == "PINHOLE") {
        v.fu = cam.params[0];
        v.fv = cam.params[1];
        v.cu = cam.params[2];
        v.cv = cam.params[3];
      } else {  // SIMPLE_PINHOLE
        v.fu = v.fv = cam.params[0];
        v.cu = cam.params[1];
        v.cv = cam.params[2];
      }
      v.rotation = quat_to_matrix(Vec4(qw, qx, qy, qz));
      v.translation = Vec3(tx, ty, tz);
      rec.views.push_back(std::move(v));

      // The observations line follows immediately (may be blank).
      std::vector<Vec2>& kps = keypoints[image_id];
      std::string obs_line;
      if (std::getline(r.f, obs_line)) {
        ++r.line_no;
        std::istringstream os(obs_line);
        double x, y;
        long long pid;
        while (os >> x >> y >> pid) kps.emplace_back(x, y);
      }
    }
  }

  std::sort(rec.views.begin(), rec.views.end(),
            [](const CameraView& a, const CameraView& b) { return a.id < b.id; });
  std::map<int, int> view_index;
  for (size_t i = 0; i < rec.views.size(); ++i) view_index[rec.views[i].id] = static_cast<int>(i);

  {
    LineReader r(dir + "/points3D.txt");
    std::string line;
    while (r.next(&line)) {
      std::istringstream ss(line);
      long long pid;
      double x, y, z, err;
      int cr, cg, cb;
      if (!(ss >> pid >> x >> y >> z >> cr >> cg >> cb >> err))
        r.fail("malformed point record");
      SfmPoint p;
      p.position = Vec3(x, y, z);
      p.color = Vec3(cr, cg, cb) / 255.0;
      p.reproj_error = err;
      int image_id, p2d_idx;
      while (ss >> image_id >> p2d_idx) {
        auto vit = view_index.find(image_id);
        if (vit == view_index.end()) r.fail("track references unknown image " + std::to_string(image_id));
        const auto& kps = keypoints[image_id];
        if (p2d_idx < 0 || p2d_idx >= static_cast<int>(kps.size()))
          r.fail("track references invalid POINT2D_IDX " + std::to_string(p2d_idx));
        p.track.push_back({vit->second, kps[p2d_idx]});
      }
      if (p.track.empty()) r.fail("point with empty track");
      rec.points.push_back(std::move(p));
    }
  }
  return rec;
}

void write_colmap(const std::string& dir, const std::vector<CameraView>& views,
                  const std::vector<SfmPoint>& points) {
  char buf[512];

  {
    std::ofstream f(dir + "/cameras.txt");
    if (!f) throw io_error("write_colmap: cannot write cameras.txt in " + dir);
    f << "# Camera list with one line of data per camera:\n"
         "#   CAMERA_ID, MODEL, WIDTH, HEIGHT, PARAMS[]\n";
    for (const auto& v : views) {
      std::snprintf(buf, sizeof(buf), "%d PINHOLE %d %d %.17g %.17g %.17g %.17g\n",
                    v.id, v.width, v.height, v.fu, v.fv, v.cu, v.cv);
      f << buf;
    }
  }

  // Per-image keypoint lists assembled from the tracks.
  std::map<int, std::vector<std::array<double, 3>>> points2d;  // x, y, point id
  std::vector<std::vector<std::pair<int, int>>> track_refs(points.size());
  for (size_t pi = 0; pi < points.size(); ++pi) {
    for (const auto& obs : points[pi].track) {
      const CameraView& v = views.at(obs.view_index);
      auto& list = points2d[v.id];
      track_refs[pi].push_back({v.id, static_cast<int>(list.size())});
      list.push_back({obs.keypoint.x(), obs.keypoint.y(), static_cast<double>(pi + 1)});
    }
  }

  {
    std::ofstream f(dir + "/images.txt");
    if (!f) throw io_error("write_colmap: cannot write images.txt in " + dir);
    f << "# Image list with two lines of data per image:\n"
         "#   IMAGE_ID, QW, QX, QY, QZ, TX, TY, TZ, CAMERA_ID, NAME\n"
         "#   POINTS2D[] as (X, Y, POINT3D_ID)\n";
    for (const auto& v : views) {
      Eigen::Quaterniond q(v.rotation);
      if (q.w() < 0) q.coeffs() = -q.coeffs();
      std::snprintf(buf, sizeof(buf),
                    "%d %.17g %.17g %.17g %.17g %.17g %.17g %.17g %d %s\n", v.id,
                    q.w(), q.x(), q.y(), q.z(), v.translation.x(), v.translation.y(),
                    v.translation.z(), v.id, v.name.c_str());
      f << buf;
      const auto it = points2d.find(v.id);
      if (it != points2d.end()) {
        bool first = true;
        for (const auto& kp : it->second) {
          std::snprintf(buf, sizeof(buf), "%s%.17g %.17g %d", first ? "" : " ",
                        kp[0], kp[1], static_cast<int>(kp[2]));
          f << buf;
          first = false;
        }
      }
      f << "\n";
    }
  }

  {
    std::ofstream f(dir + "/points3D.txt");
    if (!f) throw io_error("write_colmap: cannot write points3D.txt in " + dir);
    f << "# 3D point list with one line of data per point:\n"
         "#   POINT3D_ID, X, Y, Z, R, G, B, ERROR, TRACK[] as (IMAGE_ID, POINT2D_IDX)\n";
    for (size_t pi = 0; pi < points.size(); ++pi) {
      const SfmPoint& p = points[pi];
      auto to_byte = [](double c) {
        return std::min(255, std::max(0, static_cast<int>(std::lround(c * 255.0))));
      };
      std::snprintf(buf, sizeof(buf), "%d %.17g %.17g %.17g %d %d %d %.17g",
                    static_cast<int>(pi + 1), p.position.x(), p.position.y(),
                    p.position.z(), to_byte(p.color.x()), to_byte(p.color.y()),
                    to_byte(p.color.z()), p.reproj_error);
      f << buf;
      for (const auto& ref : track_refs[pi]) f << " " << ref.first << " " << ref.second;
      f << "\n";
    }
  }
}

}  // namespace desksplat

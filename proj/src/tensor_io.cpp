#include "trsr/tensor_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

namespace trsr {

DenseTensor read_tensor(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("tensor file is empty");
  std::istringstream header(line);
  std::string tag;
  header >> tag;
  if (tag != "shape:") throw Error("tensor file must start with 'shape:'");
  Shape shape;
  long extent = 0;
  while (header >> extent) {
    if (extent <= 0) throw Error("tensor extents must be positive");
    shape.push_back(static_cast<std::size_t>(extent));
  }
  if (!header.eof()) throw Error("malformed shape line: " + line);
  if (shape.empty()) throw Error("shape line lists no extents");

  std::vector<double> values;
  values.reserve(num_elements(shape));
  double v = 0.0;
  while (in >> v) values.push_back(v);
  if (!in.eof()) throw Error("non-numeric value in tensor data");
  if (values.size() != num_elements(shape))
    throw Error("tensor file holds " + std::to_string(values.size()) + " values, shape " + shape_string(shape) +
                " needs " + std::to_string(num_elements(shape)));
  return DenseTensor(std::move(shape), std::move(values));
}

DenseTensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_tensor(in);
}

void write_tensor(std::ostream& out, const DenseTensor& t) {
  out << "shape:";
  for (auto e : t.shape()) out << ' ' << e;
  out << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  const auto data = t.data();
  for (std::size_t i = 0; i < data.size(); ++i) out << data[i] << ((i + 1) % t.extent(0) == 0 ? '\n' : ' ');
}

void write_tensor(const std::filesystem::path& path, const DenseTensor& t) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_tensor(out, t);
}

}  // namespace trsr

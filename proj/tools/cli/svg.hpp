#pragma once

// Static SVG figures. Output depends only on the data: fixed element order,
// fixed number formatting, no timestamps.

#include <cstdint>
#include <string>
#include <vector>

namespace abc::cli {

enum class FigureKind { XyProjection, Path3d, Mask, Poincare, FractionCurve };

// Accepts "xy-projection", "3d-path", "mask", "poincare", "fraction-curve".
// Throws UsageError otherwise.
FigureKind figureKindFromString(const std::string& name);
std::string to_string(FigureKind kind);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;  // only read by 3d-path
};

struct MaskGrid {
  std::size_t columns = 0;
  std::size_t rows = 0;
  std::vector<std::uint8_t> cells;  // row-major, row 0 at the bottom
};

struct FigureData {
  std::string title;
  std::string xLabel = "x";
  std::string yLabel = "y";
  std::vector<Series> series;
  MaskGrid mask;
};

// Throws abc::Error(EmptyData) when there is nothing to draw.
std::string emitFigure(const FigureData& data, FigureKind kind);

}  // namespace abc::cli

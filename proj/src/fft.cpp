#include <cloudscope/fft.hpp>

#include <unsupported/Eigen/FFT>

#include <complex>

namespace cloudscope {

Grid<double> dft_squared_magnitude(const Grid<double>& values) {
  const Eigen::Index rows = values.rows();
  const Eigen::Index cols = values.cols();
  const Eigen::Index half = cols / 2 + 1;

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

  // Real-to-half-complex along rows, then complex transforms down the kept columns.
  Eigen::MatrixXcd spectrum(rows, half);
  Eigen::VectorXd row(cols);
  Eigen::VectorXcd row_out(half);
  for (Eigen::Index r = 0; r < rows; ++r) {
    row = values.row(r).transpose().matrix();
    fft.fwd(row_out, row);
    spectrum.row(r) = row_out.head(half).transpose();
  }
  Eigen::VectorXcd col(rows);
  Eigen::VectorXcd col_out(rows);
  for (Eigen::Index k = 0; k < half; ++k) {
    col = spectrum.col(k);
    fft.fwd(col_out, col);
    spectrum.col(k) = col_out;
  }

  Grid<double> power(rows, cols);
  power.leftCols(half) = spectrum.array().abs2();
  // F(-r, -k) = conj(F(r, k)) for real input.
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index mirror_r = (rows - r) % rows;
    for (Eigen::Index k = half; k < cols; ++k) power(r, k) = power(mirror_r, cols - k);
  }
  return power;
}

} // namespace cloudscope

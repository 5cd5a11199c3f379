#include "iparc/image.hpp"

namespace iparc {

BinaryBand foreground_band(const Image& img) {
  BinaryBand band(img.width, img.height);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      if (img.at(r, c) >= 1) band.set(r, c, true);
  return band;
}

Image indicator_image(const BinaryBand& band, int num_colors) {
  Image img(band.width(), band.height(), num_colors);
  for (int r = 0; r < band.height(); ++r)
    for (int c = 0; c < band.width(); ++c)
      if (band.at(r, c)) img.at(r, c) = 1;
  return img;
}

}  // namespace iparc

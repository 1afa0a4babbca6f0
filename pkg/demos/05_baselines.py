"""Classical comparison patterns: the N-slit grating and the Fabry-Perot etalon."""

import numpy as np

from slmspec.baselines import FabryPerotModel, airy_transmission, measured_fwhm
from slmspec.correlation import ScanGrid

grid = ScanGrid(-np.pi, np.pi, 400_001)
print("   R      F        finesse   exact    FWHM*finesse/2pi")
for r in (0.5, 0.9, 0.99):
    fp = FabryPerotModel(r)
    width = measured_fwhm(grid.phi, airy_transmission(fp, grid.phi))
    print(f"{r:5.2f}  {fp.coefficient_of_finesse:8.1f}  {fp.finesse:8.3f}  {fp.exact_finesse:8.3f}"
          f"  {width * fp.finesse / (2 * np.pi):.4f}")

# At low reflectance the familiar pi*sqrt(R)/(1-R) finesse overstates the
# peak sharpness. The exact form 2*pi/FWHM is what the pattern shows.

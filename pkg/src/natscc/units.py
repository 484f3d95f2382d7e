"""Unit conventions and conversion constants.

Money is 2005 US dollars throughout. Carbon is tonnes of carbon (tC), never CO2.
Every conversion used elsewhere in the package lives here.
"""

# atmospheric CO2: GtC per ppm
PPM_TO_GTC = 2.13

TC_PER_MTC = 1.0e6
TC_PER_GTC = 1.0e9
MTC_PER_GTC = 1.0e3

PERSONS_PER_MILLION = 1.0e6

# impact functions are tabulated in percent of GDP
PERCENT = 100.0


def mtc_to_gtc(x):
    return x / MTC_PER_GTC


def gtc_to_ppm(x):
    return x / PPM_TO_GTC

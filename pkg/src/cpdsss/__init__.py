"""Multi-user CP-DSSS link simulation: ZC spreading, circulant channels,
matched-filter uplink, time-reversal downlink, pilot estimation and capacity."""

__version__ = "0.1.0"

"""PLS-DA and baseline classifiers (KNN, linear SVM, LDA family) for high-dimensional spectra."""

__version__ = "0.1.0"

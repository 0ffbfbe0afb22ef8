from .visualize import plot_confusion_matrix, plot_flow_magnitudes, save_figure

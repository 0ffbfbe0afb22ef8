from .file_io import (
    load_bytes_from_file,
    load_csv_to_pandas,
    load_text_file,
    make_directory,
    write_bytes_to_file,
    write_dataframe_to_csv,
    write_string_to_file,
)
from .file_pointer import does_file_or_directory_exist, find_files_matching_path, get_upath

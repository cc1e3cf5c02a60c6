// unit tests live here
